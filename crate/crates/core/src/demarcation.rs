//! Maximal-scoring subsequences of SUS profiles and the resulting linker
//! calls.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lpr::FRAGMENT_LEN;
use crate::scoring::SusProfile;

/// Contiguous run of profile positions, 1-based and inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Subsequence {
    pub start: usize,
    pub end: usize,
    pub score: f64,
}

struct Candidate {
    start: usize,
    end: usize,
    /// Cumulative total before `start`.
    left: f64,
    /// Cumulative total through `end`.
    right: f64,
}

/// All maximal-scoring subsequences (Ruzzo-Tompa), left to right.
///
/// Linear time: each positive element opens a candidate that is either
/// appended or absorbs earlier candidates, which are never revisited.
pub fn maximal_scoring_subsequences(values: &[f64]) -> Vec<Subsequence> {
    let mut list: Vec<Candidate> = Vec::new();
    let mut cumulative = 0.0;
    for (idx, &x) in values.iter().enumerate() {
        let before = cumulative;
        cumulative += x;
        if x <= 0.0 {
            continue;
        }
        let mut cand = Candidate {
            start: idx + 1,
            end: idx + 1,
            left: before,
            right: cumulative,
        };
        loop {
            // rightmost j with L_j < L_k
            let j = list.iter().rposition(|c| c.left < cand.left);
            match j {
                Some(j) if list[j].right < cand.right => {
                    cand.start = list[j].start;
                    cand.left = list[j].left;
                    list.truncate(j);
                }
                _ => {
                    list.push(cand);
                    break;
                }
            }
        }
    }
    list.into_iter()
        .map(|c| Subsequence {
            start: c.start,
            end: c.end,
            score: c.right - c.left,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CallStatus {
    Linker {
        start_res: i32,
        end_res: i32,
        cum_sus: f64,
        /// Tetrapeptide indices, 1-based inclusive.
        tetra_start: usize,
        tetra_end: usize,
    },
    NoLinker,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkerCall {
    pub structure_id: String,
    pub chain_id: char,
    pub boundary: i32,
    pub k: usize,
    #[serde(flatten)]
    pub status: CallStatus,
}

impl LinkerCall {
    pub fn lpr_start(&self) -> i32 {
        self.boundary - self.k as i32 + 1
    }

    pub fn lpr_end(&self) -> i32 {
        self.boundary + self.k as i32
    }

    pub fn range(&self) -> Option<(i32, i32)> {
        match self.status {
            CallStatus::Linker {
                start_res, end_res, ..
            } => Some((start_res, end_res)),
            CallStatus::NoLinker => None,
        }
    }
}

/// Residue range covered by tetrapeptides `i..=j` of the LPR at `boundary`.
pub fn stretch_to_residues(i: usize, j: usize, boundary: i32, k: usize) -> Result<(i32, i32)> {
    let max = 2 * k - (FRAGMENT_LEN - 1);
    if i < 1 || i > j || j > max {
        return Err(Error::StretchRange {
            start: i,
            end: j,
            max,
        });
    }
    let origin = boundary - k as i32;
    Ok((origin + i as i32, origin + j as i32 + FRAGMENT_LEN as i32 - 1))
}

/// Scores closer than this are treated as tied.
pub const SCORE_TIE_EPS: f64 = 1e-9;

/// Distance from the stretch centre to the boundary centre, in residues,
/// both measured from the LPR start.
fn boundary_offset(s: &Subsequence, k: usize) -> f64 {
    let stretch_center = (s.start + s.end) as f64 / 2.0 + 1.5;
    let boundary_center = k as f64 + 0.5;
    (stretch_center - boundary_center).abs()
}

/// Pick the highest-scoring subsequence; near-ties go to the stretch whose
/// centre is closest to the boundary, then to the leftmost.
pub fn choose_subsequence(subs: &[Subsequence], k: usize) -> Option<Subsequence> {
    let best = subs.iter().map(|s| s.score).fold(f64::NEG_INFINITY, f64::max);
    subs.iter()
        .filter(|s| s.score > 0.0 && best - s.score <= SCORE_TIE_EPS * best.abs().max(1.0))
        .min_by(|a, b| {
            boundary_offset(a, k)
                .total_cmp(&boundary_offset(b, k))
                .then(a.start.cmp(&b.start))
        })
        .copied()
}

pub fn select_linker(
    subs: &[Subsequence],
    profile: &SusProfile,
    k: usize,
) -> Result<LinkerCall> {
    let status = match choose_subsequence(subs, k) {
        None => CallStatus::NoLinker,
        Some(s) => {
            let (start_res, end_res) = stretch_to_residues(s.start, s.end, profile.lpr.boundary, k)?;
            CallStatus::Linker {
                start_res,
                end_res,
                cum_sus: s.score,
                tetra_start: s.start,
                tetra_end: s.end,
            }
        }
    };
    Ok(LinkerCall {
        structure_id: profile.lpr.structure_id.clone(),
        chain_id: profile.lpr.chain_id,
        boundary: profile.lpr.boundary,
        k,
        status,
    })
}

/// Demarcate one profile end to end.
pub fn demarcate(profile: &SusProfile, k: usize) -> Result<LinkerCall> {
    let subs = maximal_scoring_subsequences(&profile.values);
    select_linker(&subs, profile, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lpr::LprKey;

    fn sub(start: usize, end: usize, score: f64) -> Subsequence {
        Subsequence { start, end, score }
    }

    #[test]
    fn all_negative() {
        assert!(maximal_scoring_subsequences(&[-1.0, -2.0, -3.0]).is_empty());
        assert!(maximal_scoring_subsequences(&[]).is_empty());
    }

    #[test]
    fn whole_sequence() {
        assert_eq!(maximal_scoring_subsequences(&[1.0, 1.0, 1.0]), vec![sub(1, 3, 3.0)]);
    }

    #[test]
    fn classic_example() {
        // Ruzzo & Tompa's worked sequence
        let x = [4.0, -5.0, 3.0, -3.0, 1.0, 2.0, -2.0, 2.0, -2.0, 1.0, 5.0];
        let got = maximal_scoring_subsequences(&x);
        assert_eq!(got, vec![sub(1, 1, 4.0), sub(3, 3, 3.0), sub(5, 11, 7.0)]);
    }

    #[test]
    fn zeros_do_not_start_runs() {
        assert_eq!(
            maximal_scoring_subsequences(&[0.0, 2.0, 0.0, -1.0, 0.0]),
            vec![sub(2, 2, 2.0)]
        );
    }

    #[test]
    fn residue_arithmetic() {
        assert_eq!(stretch_to_residues(3, 5, 100, 6).unwrap(), (97, 102));
        assert_eq!(stretch_to_residues(1, 9, 100, 6).unwrap(), (95, 106));
        assert_eq!(stretch_to_residues(4, 4, 100, 6).unwrap(), (98, 101));
        assert!(stretch_to_residues(0, 2, 100, 6).is_err());
        assert!(stretch_to_residues(5, 4, 100, 6).is_err());
        assert!(stretch_to_residues(1, 10, 100, 6).is_err());
    }

    fn profile(values: Vec<f64>) -> SusProfile {
        SusProfile {
            lpr: LprKey {
                structure_id: "p".into(),
                chain_id: 'A',
                boundary: 100,
            },
            values,
        }
    }

    #[test]
    fn single_stretch() {
        let call = demarcate(&profile(vec![-1., -1., 2., 2., -1., -1., -1., -1., -1.]), 6).unwrap();
        assert_eq!(call.range(), Some((97, 101)));
    }

    #[test]
    fn tie_prefers_boundary() {
        // edge stretch (1,1) and centred stretch (4,4): boundary centre 6.5,
        // centres 2.5 and 5.5
        let p = profile(vec![1., -5., -5., 1., -5., -5., -5., -5., -5.]);
        let subs = maximal_scoring_subsequences(&p.values);
        assert_eq!(subs.len(), 2);
        let call = select_linker(&subs, &p, 6).unwrap();
        assert_eq!(call.range(), Some((98, 101)));

        // equidistant candidates fall back to the leftmost
        let p = profile(vec![-5., -5., -5., 1., -5., 1., -5., -5., -5.]);
        let call = demarcate(&p, 6).unwrap();
        assert!(matches!(call.status, CallStatus::Linker { tetra_start: 4, .. }));
    }

    #[test]
    fn no_linker() {
        let call = demarcate(&profile(vec![-0.5; 9]), 6).unwrap();
        assert_eq!(call.status, CallStatus::NoLinker);
        assert_eq!((call.lpr_start(), call.lpr_end()), (95, 106));
    }
}
