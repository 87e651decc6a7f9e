//! Column standardization and principal component projection of the
//! invariant matrix.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub row_ids: Vec<String>,
    pub col_labels: Vec<String>,
    pub data: DMatrix<f64>,
}

impl FeatureMatrix {
    pub fn new(row_ids: Vec<String>, col_labels: Vec<String>, data: DMatrix<f64>) -> Result<Self> {
        if row_ids.len() != data.nrows() {
            return Err(Error::DimensionMismatch {
                expected: data.nrows(),
                got: row_ids.len(),
            });
        }
        if col_labels.len() != data.ncols() {
            return Err(Error::DimensionMismatch {
                expected: data.ncols(),
                got: col_labels.len(),
            });
        }
        for c in 0..data.ncols() {
            for r in 0..data.nrows() {
                if !data[(r, c)].is_finite() {
                    return Err(Error::NonFinite { row: r, column: c });
                }
            }
        }
        Ok(FeatureMatrix {
            row_ids,
            col_labels,
            data,
        })
    }

    /// Unlabelled matrix; rows are numbered and columns named `c0, c1, ...`.
    pub fn from_matrix(data: DMatrix<f64>) -> Result<Self> {
        let rows = (0..data.nrows()).map(|i| i.to_string()).collect();
        let cols = (0..data.ncols()).map(|j| format!("c{j}")).collect();
        Self::new(rows, cols, data)
    }

    pub fn nrows(&self) -> usize {
        self.data.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.data.ncols()
    }
}

/// Fitted column means and sample standard deviations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

fn column_mean_sd(data: &DMatrix<f64>, c: usize) -> (f64, f64) {
    let n = data.nrows() as f64;
    let col = data.column(c);
    let mean = col.sum() / n;
    let ss: f64 = col.iter().map(|x| (x - mean).powi(2)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Z-score every column (sample standard deviation, `n - 1`).
pub fn standardize(x: &FeatureMatrix) -> Result<(FeatureMatrix, Standardization)> {
    let n = x.nrows();
    if n < 2 {
        return Err(Error::TooFewRows { needed: 2, got: n });
    }
    let mut means = Vec::with_capacity(x.ncols());
    let mut stds = Vec::with_capacity(x.ncols());
    let mut data = x.data.clone();
    for c in 0..x.ncols() {
        let (mean, sd) = column_mean_sd(&x.data, c);
        if !(sd > 1e-12 * mean.abs().max(1.0)) {
            return Err(Error::ZeroVariance {
                column: c,
                label: x.col_labels[c].clone(),
            });
        }
        data.column_mut(c).apply(|v| *v = (*v - mean) / sd);
        means.push(mean);
        stds.push(sd);
    }
    Ok((
        FeatureMatrix {
            row_ids: x.row_ids.clone(),
            col_labels: x.col_labels.clone(),
            data,
        },
        Standardization { means, stds },
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PcaModel {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    /// Columns are eigenvectors, ordered by decreasing eigenvalue.
    pub components: DMatrix<f64>,
    pub eigenvalues: Vec<f64>,
}

impl PcaModel {
    pub fn dims(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn total_variance(&self) -> f64 {
        self.eigenvalues.iter().sum()
    }

    /// Fraction of variance explained by the first `m` components.
    pub fn explained(&self, m: usize) -> f64 {
        self.eigenvalues[..m].iter().sum::<f64>() / self.total_variance()
    }
}

/// Sample covariance (`n - 1`) of the columns of `data`.
pub fn covariance(data: &DMatrix<f64>) -> DMatrix<f64> {
    let n = data.nrows();
    let means = data.row_mean();
    let mut centered = data.clone();
    for mut row in centered.row_iter_mut() {
        row -= &means;
    }
    centered.tr_mul(&centered) / (n as f64 - 1.0)
}

/// Eigendecomposition of the sample covariance of standardized data.
///
/// Eigenvectors are sign-fixed so that the coefficient of largest magnitude
/// is positive (first such coefficient on ties).
pub fn fit_pca(z: &FeatureMatrix, scaling: &Standardization) -> Result<PcaModel> {
    let (n, p) = z.data.shape();
    if n <= p {
        return Err(Error::TooFewRows {
            needed: p + 1,
            got: n,
        });
    }
    if scaling.means.len() != p || scaling.stds.len() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            got: scaling.means.len(),
        });
    }
    let cov = covariance(&z.data);
    for i in 0..p {
        for j in 0..p {
            let a = cov[(i, j)];
            if !a.is_finite() || (a - cov[(j, i)]).abs() > 1e-12 * a.abs().max(1.0) {
                return Err(Error::Internal(format!(
                    "covariance not symmetric-finite at ({i}, {j})"
                )));
            }
        }
    }

    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));

    let mut components = DMatrix::zeros(p, p);
    let mut eigenvalues = Vec::with_capacity(p);
    for (dst, &src) in order.iter().enumerate() {
        let mut v: DVector<f64> = eig.eigenvectors.column(src).into_owned();
        let lead = v
            .iter()
            .enumerate()
            .fold(0, |best, (i, x)| if x.abs() > v[best].abs() { i } else { best });
        if v[lead] < 0.0 {
            v.neg_mut();
        }
        components.set_column(dst, &v);
        eigenvalues.push(eig.eigenvalues[src].max(0.0));
    }

    Ok(PcaModel {
        means: scaling.means.clone(),
        stds: scaling.stds.clone(),
        components,
        eigenvalues,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "lowercase")]
pub enum ComponentPolicy {
    Fixed(usize),
    Variance(f64),
}

impl Default for ComponentPolicy {
    fn default() -> Self {
        ComponentPolicy::Variance(0.99)
    }
}

impl std::fmt::Display for ComponentPolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ComponentPolicy::Fixed(m) => write!(f, "fixed:{m}"),
            ComponentPolicy::Variance(t) => write!(f, "variance:{t}"),
        }
    }
}

impl std::str::FromStr for ComponentPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("expected variance:<theta> or fixed:<m>, got {s:?}"));
        let (kind, value) = s.split_once(':').ok_or_else(bad)?;
        match kind {
            "fixed" => Ok(ComponentPolicy::Fixed(value.parse().map_err(|_| bad())?)),
            "variance" => {
                let theta: f64 = value.parse().map_err(|_| bad())?;
                if !(theta > 0.0 && theta <= 1.0) {
                    return Err(Error::VarianceThreshold(theta));
                }
                Ok(ComponentPolicy::Variance(theta))
            }
            _ => Err(bad()),
        }
    }
}

/// Number of leading components to keep under `policy`.
pub fn select_components(model: &PcaModel, policy: ComponentPolicy) -> Result<usize> {
    let p = model.dims();
    match policy {
        ComponentPolicy::Fixed(m) => Ok(m.clamp(1, p)),
        ComponentPolicy::Variance(theta) => {
            if !(theta > 0.0 && theta <= 1.0) {
                return Err(Error::VarianceThreshold(theta));
            }
            let total = model.total_variance();
            let target = theta * total - 1e-12 * total;
            let mut acc = 0.0;
            for (i, l) in model.eigenvalues.iter().enumerate() {
                acc += l;
                if acc >= target {
                    return Ok(i + 1);
                }
            }
            Ok(p)
        }
    }
}

/// Project standardized rows onto the first `m` components.
pub fn transform(z: &FeatureMatrix, model: &PcaModel, m: usize) -> Result<FeatureMatrix> {
    if z.ncols() != model.dims() {
        return Err(Error::DimensionMismatch {
            expected: model.dims(),
            got: z.ncols(),
        });
    }
    if m == 0 || m > model.dims() {
        return Err(Error::ComponentRange {
            m,
            max: model.dims(),
        });
    }
    let data = &z.data * model.components.columns(0, m);
    Ok(FeatureMatrix {
        row_ids: z.row_ids.clone(),
        col_labels: (1..=m).map(|i| format!("PC{i}")).collect(),
        data,
    })
}

const MODEL_HEADER: &str = "# linker-scout pca model v1";

fn push_row(out: &mut String, name: &str, values: impl Iterator<Item = f64>) {
    out.push_str(name);
    for v in values {
        let _ = write!(out, "\t{v:.16e}");
    }
    out.push('\n');
}

/// Plain-text model dump: 17 significant digits, components row-major.
pub fn write_model(model: &PcaModel) -> String {
    let p = model.dims();
    let mut out = format!("{MODEL_HEADER}\ndims\t{p}\n");
    push_row(&mut out, "means", model.means.iter().copied());
    push_row(&mut out, "stds", model.stds.iter().copied());
    push_row(&mut out, "eigenvalues", model.eigenvalues.iter().copied());
    for r in 0..p {
        push_row(
            &mut out,
            "component_row",
            (0..p).map(|c| model.components[(r, c)]),
        );
    }
    out
}

pub fn read_model(text: &str) -> Result<PcaModel> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, l)) if l == MODEL_HEADER => {}
        _ => return Err(Error::parse(1, "missing pca model header")),
    }
    let mut dims = None;
    let mut means = Vec::new();
    let mut stds = Vec::new();
    let mut eigenvalues = Vec::new();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let mut fields = line.split('\t');
        let name = fields.next().unwrap_or("");
        let values = fields
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| Error::parse(lineno, format!("bad number {f:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        match name {
            "dims" => dims = values.first().map(|&d| d as usize),
            "means" => means = values,
            "stds" => stds = values,
            "eigenvalues" => eigenvalues = values,
            "component_row" => rows.push(values),
            "" => {}
            other => return Err(Error::parse(lineno, format!("unknown field {other:?}"))),
        }
    }
    let p = dims.ok_or_else(|| Error::parse(1, "missing dims"))?;
    if [means.len(), stds.len(), eigenvalues.len(), rows.len()]
        .iter()
        .any(|&l| l != p)
        || rows.iter().any(|r| r.len() != p)
    {
        return Err(Error::parse(1, "pca model has inconsistent dimensions"));
    }
    let components = DMatrix::from_fn(p, p, |r, c| rows[r][c]);
    Ok(PcaModel {
        means,
        stds,
        components,
        eigenvalues,
    })
}
