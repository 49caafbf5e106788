//! Reference checker: direct recursion over adjacency matrices, with its own
//! update constructions. Exponential in nesting; meant for cross-checking
//! the labelling checker on small inputs.

use std::collections::BTreeSet;

use crate::model::{Model, StateId};
use crate::syntax::Formula;

use super::kind::{preflight, CheckError, SemanticsKind};

#[derive(Debug, Clone)]
struct Matrix {
    val: Vec<BTreeSet<String>>,
    /// `rel[a][s][t]`
    rel: Vec<Vec<Vec<bool>>>,
    /// `depth[a][s]`
    depth: Vec<Vec<i64>>,
}

impl Matrix {
    fn from_model(m: &Model) -> Matrix {
        let n = m.len();
        let rel = m
            .relations()
            .iter()
            .map(|r| {
                (0..n)
                    .map(|s| (0..n).map(|t| r.related(s, t)).collect())
                    .collect()
            })
            .collect();
        Matrix {
            val: m.states().map(|s| m.valuation(s).clone()).collect(),
            rel,
            depth: m.depths().to_vec(),
        }
    }

    fn len(&self) -> usize {
        self.val.len()
    }

    fn eval(&self, s: StateId, f: &Formula, kind: SemanticsKind) -> bool {
        match f {
            Formula::Atom(p) => p == crate::syntax::TOP_ATOM || self.val[s].contains(p),
            Formula::DepthExact(a, d) => self.depth[a.0][s] == *d,
            Formula::DepthAtLeast(a, d) => self.depth[a.0][s] >= *d,
            Formula::Not(g) => !self.eval(s, g, kind),
            Formula::And(l, r) => self.eval(s, l, kind) && self.eval(s, r, kind),
            Formula::KnowInf(a, g) => {
                (0..self.len()).all(|t| !self.rel[a.0][s][t] || self.eval(t, g, kind))
            }
            Formula::Know(a, g) => {
                self.depth[a.0][s] >= g.modal_depth() as i64
                    && (0..self.len()).all(|t| !self.rel[a.0][s][t] || self.eval(t, g, kind))
            }
            Formula::Announce(phi, psi) => {
                if !self.eval(s, phi, kind) {
                    return true;
                }
                let truth: Vec<bool> = (0..self.len()).map(|t| self.eval(t, phi, kind)).collect();
                let d = phi.modal_depth() as i64;
                let (next, point) = match kind {
                    SemanticsKind::Dbel | SemanticsKind::Dpal => self.dpal(&truth, d, s),
                    SemanticsKind::Edpal => self.edpal(&truth, d, s),
                    SemanticsKind::Adpal => (self.adpal(&truth, d), s),
                };
                next.eval(point, psi, kind)
            }
        }
    }

    /// States `(c, s)` listed as `(0, 0..n)` then `(1, s)` for true `s`.
    #[allow(clippy::needless_range_loop)]
    fn dpal(&self, truth: &[bool], d: i64, s0: StateId) -> (Matrix, StateId) {
        let n = self.len();
        let mut states: Vec<(u8, StateId)> = (0..n).map(|s| (0, s)).collect();
        states.extend((0..n).filter(|&s| truth[s]).map(|s| (1, s)));
        let total = states.len();
        let point = states
            .iter()
            .position(|&x| x == (1, s0))
            .expect("positive copy");
        let mut rel = Vec::new();
        let mut depth = Vec::new();
        for a in 0..self.rel.len() {
            let mut r = vec![vec![false; total]; total];
            for (i, &(ci, si)) in states.iter().enumerate() {
                for (j, &(cj, sj)) in states.iter().enumerate() {
                    r[i][j] = (ci == cj && self.rel[a][si][sj])
                        || (si == sj && ci != cj && self.depth[a][si] < d);
                }
            }
            // Symmetric, then transitive closure.
            for i in 0..total {
                for j in 0..total {
                    if r[i][j] {
                        r[j][i] = true;
                    }
                }
            }
            for k in 0..total {
                for i in 0..total {
                    if r[i][k] {
                        for j in 0..total {
                            if r[k][j] {
                                r[i][j] = true;
                            }
                        }
                    }
                }
            }
            rel.push(r);
            depth.push(
                states
                    .iter()
                    .map(|&(c, s)| {
                        let x = self.depth[a][s];
                        if c == 1 && x >= d {
                            x - d
                        } else {
                            x
                        }
                    })
                    .collect(),
            );
        }
        let val = states.iter().map(|&(_, s)| self.val[s].clone()).collect();
        (Matrix { val, rel, depth }, point)
    }

    fn edpal(&self, truth: &[bool], d: i64, s0: StateId) -> (Matrix, StateId) {
        let keep: Vec<StateId> = (0..self.len()).filter(|&s| truth[s]).collect();
        let point = keep.iter().position(|&s| s == s0).expect("kept");
        let rel = self
            .rel
            .iter()
            .map(|r| {
                keep.iter()
                    .map(|&s| keep.iter().map(|&t| r[s][t]).collect())
                    .collect()
            })
            .collect();
        let depth = self
            .depth
            .iter()
            .map(|row| keep.iter().map(|&s| row[s] - d).collect())
            .collect();
        let val = keep.iter().map(|&s| self.val[s].clone()).collect();
        (Matrix { val, rel, depth }, point)
    }

    fn adpal(&self, truth: &[bool], d: i64) -> Matrix {
        let n = self.len();
        let mut out = self.clone();
        for a in 0..self.rel.len() {
            for s in 0..n {
                let deep = self.depth[a][s] >= d;
                for t in 0..n {
                    if deep && truth[s] != truth[t] {
                        out.rel[a][s][t] = false;
                    }
                }
                if deep {
                    out.depth[a][s] -= d;
                }
            }
        }
        out
    }
}

/// Truth of `f` at `s`, computed by plain recursion.
pub fn check_naive(
    m: &Model,
    s: StateId,
    f: &Formula,
    kind: SemanticsKind,
) -> Result<bool, CheckError> {
    preflight(m, f, kind)?;
    if s >= m.len() {
        return Err(CheckError::StateOutOfRange(s));
    }
    Ok(Matrix::from_model(m).eval(s, f, kind))
}
