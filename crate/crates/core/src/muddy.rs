//! Muddy children models and formulas, and the 3-SAT hardness reduction.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::model::{Mode, Model, Relation, StateId};
use crate::semantics::{check, CheckError, SemanticsKind};
use crate::syntax::Formula;

/// Largest number of children accepted by [`build_muddy`].
pub const MAX_CHILDREN: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MuddyError {
    #[error("need 1 <= k <= n, got n = {n}, k = {k}")]
    KOutOfRange { n: usize, k: usize },
    #[error("n = {0} children is outside 1..={MAX_CHILDREN}")]
    NOutOfRange(usize),
    #[error("expected {expected} per-agent depths, got {got}")]
    DepthCount { expected: usize, got: usize },
    #[error(transparent)]
    Check(#[from] CheckError),
}

/// A muddy children model after the father's announcement: states are the
/// non-zero bit vectors of length `n`, child `i` cannot tell apart vectors
/// differing only at coordinate `i`, and `m_i` holds where coordinate `i` is
/// 1. The initial state has exactly the first `k` children muddy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuddyInstance {
    pub n: usize,
    pub k: usize,
    pub model: Model,
    pub initial: StateId,
}

/// Name of child `i`'s muddiness atom.
pub fn muddy_atom(i: usize) -> String {
    format!("m{i}")
}

/// Builds the muddy children model; `depth(i, coords)` gives child `i`'s
/// depth at the state with the given coordinates.
pub fn build_muddy_with(
    n: usize,
    k: usize,
    depth: impl Fn(usize, &[bool]) -> i64,
) -> Result<MuddyInstance, MuddyError> {
    if n == 0 || n > MAX_CHILDREN {
        return Err(MuddyError::NOutOfRange(n));
    }
    if k == 0 || k > n {
        return Err(MuddyError::KOutOfRange { n, k });
    }
    // State index `mask - 1` for masks 1..2^n; bit i is coordinate i.
    let masks: Vec<usize> = (1..1usize << n).collect();
    let coords = |mask: usize| -> Vec<bool> { (0..n).map(|i| mask >> i & 1 == 1).collect() };
    let names = masks
        .iter()
        .map(|&mask| {
            coords(mask)
                .iter()
                .map(|&b| if b { '1' } else { '0' })
                .collect()
        })
        .collect();
    let val = masks
        .iter()
        .map(|&mask| {
            (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(muddy_atom)
                .collect::<BTreeSet<_>>()
        })
        .collect();
    let rel = (0..n)
        .map(|i| {
            let labels: Vec<usize> = masks.iter().map(|&mask| mask & !(1 << i)).collect();
            Relation::partition(&labels)
        })
        .collect();
    let depths = (0..n)
        .map(|i| masks.iter().map(|&mask| depth(i, &coords(mask))).collect())
        .collect();
    let model = Model::new(names, val, rel, depths, Mode::Equivalence)
        .expect("muddy children construction is well formed");
    Ok(MuddyInstance {
        n,
        k,
        model,
        initial: (1 << k) - 2,
    })
}

/// Builds the muddy children model with a constant depth per child.
pub fn build_muddy(n: usize, k: usize, depths: &[i64]) -> Result<MuddyInstance, MuddyError> {
    if depths.len() != n {
        return Err(MuddyError::DepthCount {
            expected: n,
            got: depths.len(),
        });
    }
    build_muddy_with(n, k, |i, _| depths[i])
}

fn know_muddy(i: usize) -> Formula {
    Formula::know(i, Formula::atom(muddy_atom(i)))
}

/// `⟨¬K_{k-1} m_{k-1}⟩ ⋯ ⟨¬K_1 m_1⟩ K_0 m_0`.
pub fn phi_k(k: usize) -> Formula {
    assert!(k >= 1, "phi_k needs k >= 1");
    (1..k).fold(know_muddy(0), |body, i| {
        Formula::dual_announce(know_muddy(i).not(), body)
    })
}

/// `K_0(P_0^{k-1} ∧ K_1(P_1^{k-2} ∧ ⋯ K_{k-1}(P_{k-1}^0)))`: every child
/// knows the next is deep enough for the rest of the chain.
pub fn upper_bound_hypothesis(k: usize) -> Formula {
    assert!(k >= 1, "upper_bound_hypothesis needs k >= 1");
    let last = k - 1;
    let innermost = Formula::know(last, Formula::at_least(last, 0));
    (0..last).rev().fold(innermost, |inner, i| {
        Formula::know(i, Formula::at_least(i, (k - 1 - i) as i64).and(inner))
    })
}

/// `hypothesis → φ_k`.
pub fn upper_bound_formula(k: usize) -> Formula {
    upper_bound_hypothesis(k).implies(phi_k(k))
}

/// The necessary condition on child 0's knowledge of depths:
/// `K_0(P_0^{k-1} ∧ ⋀_{i=1}^{k-1} K∞_1 ⋯ K∞_i(¬(m_1 ∨ ⋯ ∨ m_i) → P_i^{k-2-i}))`.
///
/// The conjunct for `i = k-1` asks for depth at least `-1`, which always
/// holds, and is written as `⊤`.
pub fn lower_bound_conclusion(k: usize) -> Formula {
    assert!(k >= 1, "lower_bound_conclusion needs k >= 1");
    let mut parts = vec![Formula::at_least(0, k as i64 - 1)];
    for i in 1..k {
        let bound = k as i64 - 2 - i as i64;
        let target = if bound < 0 {
            Formula::top()
        } else {
            Formula::at_least(i, bound)
        };
        let clean = Formula::disj((1..=i).map(|j| Formula::atom(muddy_atom(j)))).not();
        let chain = (1..=i)
            .rev()
            .fold(clean.implies(target), |body, j| Formula::know_inf(j, body));
        parts.push(chain);
    }
    Formula::know(0, Formula::conj(parts))
}

/// `φ_k → conclusion`.
pub fn lower_bound_formula(k: usize) -> Formula {
    phi_k(k).implies(lower_bound_conclusion(k))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LowerBoundReport {
    pub k: usize,
    /// Depth assignments checked.
    pub cases: usize,
    /// Assignments where the implication failed at the initial state.
    pub violations: Vec<Vec<i64>>,
    /// Assignments with `d(0) < k-1` where `φ_k` nevertheless held.
    pub witness_failures: Vec<Vec<i64>>,
}

/// Checks the lower-bound implication under DPAL on `n = k` children for
/// every constant per-child depth assignment with entries in
/// `0..=max_depth`.
pub fn lower_bound_check(k: usize, max_depth: i64) -> Result<LowerBoundReport, MuddyError> {
    use rayon::prelude::*;

    let formula = lower_bound_formula(k);
    let phi = phi_k(k);
    let grid = depth_grid(k, max_depth);
    let results: Vec<(Vec<i64>, bool, bool)> = grid
        .into_par_iter()
        .map(|depths| -> Result<_, MuddyError> {
            let inst = build_muddy(k, k, &depths)?;
            let ok = check(&inst.model, inst.initial, &formula, SemanticsKind::Dpal)?;
            let witness_ok = depths[0] >= k as i64 - 1
                || !check(&inst.model, inst.initial, &phi, SemanticsKind::Dpal)?;
            Ok((depths, ok, witness_ok))
        })
        .collect::<Result<_, _>>()?;
    let cases = results.len();
    let mut report = LowerBoundReport {
        k,
        cases,
        violations: Vec::new(),
        witness_failures: Vec::new(),
    };
    for (depths, ok, witness_ok) in results {
        if !ok {
            report.violations.push(depths.clone());
        }
        if !witness_ok {
            report.witness_failures.push(depths);
        }
    }
    Ok(report)
}

/// All vectors of length `len` with entries in `0..=max`, in lexicographic order.
pub fn depth_grid(len: usize, max: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=max).map(move |d| {
                    let mut v = prefix.clone();
                    v.push(d);
                    v
                })
            })
            .collect();
    }
    out
}

/// Parses a depth specification for `n` children: either a comma-separated
/// list (`2,1,0`) or an arithmetic expression in `k`, `n` and `i` such as
/// `k-1-i`.
pub fn parse_depths(spec: &str, n: usize, k: usize) -> Result<Vec<i64>, String> {
    if spec.contains(',') || spec.trim().parse::<i64>().is_ok() {
        let list: Vec<i64> = spec
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<i64>()
                    .map_err(|e| format!("bad depth `{x}`: {e}"))
            })
            .collect::<Result<_, _>>()?;
        if list.len() == 1 {
            return Ok(vec![list[0]; n]);
        }
        if list.len() != n {
            return Err(format!("expected {n} depths, got {}", list.len()));
        }
        return Ok(list);
    }
    (0..n)
        .map(|i| eval_depth_expr(spec, n as i64, k as i64, i as i64))
        .collect()
}

/// Evaluates `+`/`-`/`*` over integers and the variables `n`, `k`, `i`.
fn eval_depth_expr(expr: &str, n: i64, k: i64, i: i64) -> Result<i64, String> {
    let mut total = 0i64;
    let mut sign = 1i64;
    let mut term: Option<i64> = None;
    let mut pending_mul = false;
    let mut chars = expr.chars().filter(|c| !c.is_whitespace()).peekable();
    let bad = || format!("bad depth expression `{expr}`");
    while let Some(c) = chars.next() {
        let value = match c {
            '+' | '-' => {
                if pending_mul {
                    return Err(bad());
                }
                total += sign * term.take().ok_or_else(bad)?;
                sign = if c == '+' { 1 } else { -1 };
                continue;
            }
            '*' => {
                if term.is_none() {
                    return Err(bad());
                }
                pending_mul = true;
                continue;
            }
            'n' => n,
            'k' => k,
            'i' => i,
            d if d.is_ascii_digit() => {
                let mut v = d.to_digit(10).expect("digit") as i64;
                while let Some(nd) = chars.peek().and_then(|c| c.to_digit(10)) {
                    v = v * 10 + nd as i64;
                    chars.next();
                }
                v
            }
            _ => return Err(bad()),
        };
        term = Some(match (term, pending_mul) {
            (Some(t), true) => t * value,
            (None, false) => value,
            _ => return Err(bad()),
        });
        pending_mul = false;
    }
    if pending_mul {
        return Err(bad());
    }
    Ok(total + sign * term.ok_or_else(bad)?)
}

/// `⟨¬K_2 m_2⟩⟨¬K_1 m_1⟩¬K_2 ⊤`: after two announcements child 2 no longer
/// knows even a tautology. True only under EDPAL on three children with
/// depths `2 - i`.
pub fn amnesia_formula() -> Formula {
    Formula::dual_announce(
        know_muddy(2).not(),
        Formula::dual_announce(know_muddy(1).not(), Formula::know(2, Formula::top()).not()),
    )
}

/// `⟨K_1 ¬K_2 m_2⟩K_1 K_0 m_0`: child 1 learns that child 0 knows it is
/// muddy. True only under ADPAL on three children with depths `2 - i`.
pub fn leakage_formula() -> Formula {
    Formula::dual_announce(
        Formula::know(1, know_muddy(2).not()),
        Formula::know(1, know_muddy(0)),
    )
}

/// `⟨K_1 ¬K_2 m_2⟩K_0 m_0`.
pub fn leakage_direct_formula() -> Formula {
    Formula::dual_announce(Formula::know(1, know_muddy(2).not()), know_muddy(0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    /// Zero-based variable index.
    pub var: usize,
    pub positive: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal {
            var,
            positive: true,
        }
    }

    pub fn neg(var: usize) -> Self {
        Literal {
            var,
            positive: false,
        }
    }

    fn eval(self, assignment: &[bool]) -> bool {
        assignment[self.var] == self.positive
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("!")?;
        }
        write!(f, "x{}", self.var + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatInstanceError {
    #[error("literal x{} refers past the {vars} declared variables", .var + 1)]
    VariableOutOfRange { var: usize, vars: usize },
    #[error("a clause needs between 1 and 3 literals, got {0}")]
    ClauseWidth(usize),
}

/// A CNF formula with exactly three literals per clause.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeSatInstance {
    pub vars: usize,
    pub clauses: Vec<[Literal; 3]>,
}

impl ThreeSatInstance {
    pub fn new(vars: usize, clauses: Vec<[Literal; 3]>) -> Result<Self, SatInstanceError> {
        for lit in clauses.iter().flatten() {
            if lit.var >= vars {
                return Err(SatInstanceError::VariableOutOfRange { var: lit.var, vars });
            }
        }
        Ok(ThreeSatInstance { vars, clauses })
    }

    /// Builds an instance from clauses of one to three literals, padding
    /// short clauses by repeating their last literal.
    pub fn padded(vars: usize, clauses: &[Vec<Literal>]) -> Result<Self, SatInstanceError> {
        let mut out = Vec::with_capacity(clauses.len());
        for c in clauses {
            if c.is_empty() || c.len() > 3 {
                return Err(SatInstanceError::ClauseWidth(c.len()));
            }
            let last = c[c.len() - 1];
            out.push([c[0], *c.get(1).unwrap_or(&last), *c.get(2).unwrap_or(&last)]);
        }
        ThreeSatInstance::new(vars, out)
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| l.eval(assignment)))
    }

    /// Truth-table satisfiability.
    pub fn satisfiable(&self) -> bool {
        (0..1u64 << self.vars).any(|bits| {
            let a: Vec<bool> = (0..self.vars).map(|v| bits >> v & 1 == 1).collect();
            self.eval(&a)
        })
    }
}

impl fmt::Display for ThreeSatInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clauses.is_empty() {
            return f.write_str("true");
        }
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            write!(f, "({} | {} | {})", c[0], c[1], c[2])?;
        }
        Ok(())
    }
}

/// The one-state DPAL model and formula `ω` such that `ω` holds iff the
/// instance is satisfiable.
///
/// Agents are `0..=n+1`; variable `x_i` becomes `P_i^1`. Agent `i` has depth
/// `n + i`, agent 0 has depth 0 and agent `n + 1` has depth `5n²`. The
/// formula announces `K_{n+1}^{2n} ⊤, K_{n+1}^{2n-1} ⊤, …, K_{n+1}^{n+1} ⊤`
/// and then asks `¬K_0 ¬φ'`.
pub fn reduce_3sat(inst: &ThreeSatInstance) -> (Model, Formula) {
    let n = inst.vars;
    let mut depths = vec![0i64];
    depths.extend((1..=n).map(|i| (n + i) as i64));
    depths.push(5 * (n * n) as i64);
    let model = crate::fixtures::single_state(&depths);

    let lit = |l: &Literal| {
        let p = Formula::at_least(l.var + 1, 1);
        if l.positive {
            p
        } else {
            p.not()
        }
    };
    let translated = Formula::conj(
        inst.clauses
            .iter()
            .map(|c| Formula::disj(c.iter().map(lit))),
    );
    let body = Formula::know(0, translated.not()).not();
    let top_agent = n + 1;
    let omega = ((n + 1)..=(2 * n)).fold(body, |inner, j| {
        Formula::announce(Formula::know_iter(top_agent, j, Formula::top()), inner)
    });
    (model, omega)
}

/// Checks `ω` under DPAL.
pub fn reduction_holds(inst: &ThreeSatInstance) -> Result<bool, CheckError> {
    let (model, omega) = reduce_3sat(inst);
    check(&model, 0, &omega, SemanticsKind::Dpal)
}

/// Every clause of one to three distinct literals over `vars` variables,
/// padded to width three.
pub fn all_clauses(vars: usize) -> Vec<[Literal; 3]> {
    let lits: Vec<Literal> = (0..vars)
        .flat_map(|v| [Literal::pos(v), Literal::neg(v)])
        .collect();
    let mut out = Vec::new();
    let m = lits.len();
    for mask in 1u32..1 << m {
        let chosen: Vec<Literal> = (0..m)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| lits[i])
            .collect();
        if chosen.len() <= 3 {
            let last = chosen[chosen.len() - 1];
            out.push([
                chosen[0],
                *chosen.get(1).unwrap_or(&last),
                *chosen.get(2).unwrap_or(&last),
            ]);
        }
    }
    out
}

/// Calls `f` on every set of at most `max_clauses` distinct clauses from
/// `clauses`, as index combinations in lexicographic order.
pub fn for_each_clause_set(clauses: usize, max_clauses: usize, mut f: impl FnMut(&[usize])) {
    fn go(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        f(cur);
        if left == 0 {
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, left - 1, cur, f);
            cur.pop();
        }
    }
    go(0, clauses, max_clauses, &mut Vec::new(), &mut f);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{is_unambiguous, validate};
    use crate::syntax::{parse, AgentId};

    #[test]
    fn two_children() {
        let inst = build_muddy(2, 2, &[1, 0]).unwrap();
        assert_eq!(inst.model.len(), 3);
        assert_eq!(inst.model.name(inst.initial), "11");
        let a0 = inst.model.relation(AgentId(0));
        let s10 = inst.model.state_index("10").unwrap();
        let s01 = inst.model.state_index("01").unwrap();
        assert!(a0.related(inst.initial, s01));
        assert!(!a0.related(inst.initial, s10));
        assert!(validate(&inst.model, Mode::Equivalence).is_ok());
        assert!(is_unambiguous(&inst.model));
    }

    #[test]
    fn initial_state_has_first_k_muddy() {
        let inst = build_muddy(4, 2, &[0; 4]).unwrap();
        assert_eq!(inst.model.name(inst.initial), "1100");
        assert_eq!(inst.model.len(), 15);
        assert!(matches!(
            build_muddy(2, 3, &[0, 0]),
            Err(MuddyError::KOutOfRange { .. })
        ));
        assert!(matches!(
            build_muddy(2, 0, &[0, 0]),
            Err(MuddyError::KOutOfRange { .. })
        ));
    }

    #[test]
    fn phi_shapes() {
        assert_eq!(phi_k(1), parse("K[0] m0").unwrap());
        assert_eq!(phi_k(2), parse("<!K[1] m1>K[0] m0").unwrap());
        assert_eq!(phi_k(3), parse("<!K[2] m2><!K[1] m1>K[0] m0").unwrap());
        assert_eq!(phi_k(4).modal_depth(), 4);
        assert_eq!(
            upper_bound_hypothesis(2),
            parse("K[0](P[0,1] & K[1] P[1,0])").unwrap()
        );
        assert_eq!(
            lower_bound_conclusion(2),
            parse("K[0](P[0,1] & Kinf[1](!m1 -> true))").unwrap()
        );
        assert_eq!(
            lower_bound_conclusion(3),
            parse("K[0](P[0,2] & Kinf[1](!m1 -> P[1,0]) & Kinf[1] Kinf[2](!(m1 | m2) -> true))")
                .unwrap()
        );
    }

    #[test]
    fn two_children_announcement() {
        let inst = build_muddy(2, 2, &[1, 0]).unwrap();
        assert!(check(&inst.model, inst.initial, &phi_k(2), SemanticsKind::Dpal).unwrap());
        let shallow = build_muddy(2, 2, &[0, 0]).unwrap();
        assert!(!check(
            &shallow.model,
            shallow.initial,
            &phi_k(2),
            SemanticsKind::Dpal
        )
        .unwrap());
    }

    #[test]
    fn depth_specs() {
        assert_eq!(parse_depths("k-1-i", 3, 3).unwrap(), vec![2, 1, 0]);
        assert_eq!(parse_depths("2-i", 3, 3).unwrap(), vec![2, 1, 0]);
        assert_eq!(parse_depths("2*i+1", 3, 3).unwrap(), vec![1, 3, 5]);
        assert_eq!(parse_depths("1,0,2", 3, 3).unwrap(), vec![1, 0, 2]);
        assert_eq!(parse_depths("2", 3, 3).unwrap(), vec![2, 2, 2]);
        assert!(parse_depths("1,2", 3, 3).is_err());
        assert!(parse_depths("k-", 3, 3).is_err());
        assert!(parse_depths("q", 3, 3).is_err());
    }

    #[test]
    fn depth_grid_size() {
        assert_eq!(depth_grid(3, 3).len(), 64);
        assert_eq!(
            depth_grid(2, 1),
            vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]
        );
    }

    #[test]
    fn clause_enumeration() {
        assert_eq!(all_clauses(3).len(), 41);
        let mut count = 0usize;
        for_each_clause_set(41, 4, |_| count += 1);
        assert_eq!(count, 1 + 41 + 820 + 10660 + 101270);
    }

    #[test]
    fn small_reductions() {
        let x = Literal::pos(0);
        let nx = Literal::neg(0);
        let unsat = ThreeSatInstance::new(1, vec![[x, x, x], [nx, nx, nx]]).unwrap();
        assert!(!unsat.satisfiable());
        assert!(!reduction_holds(&unsat).unwrap());
        let sat = ThreeSatInstance::new(2, vec![[x, Literal::neg(1), Literal::neg(1)]]).unwrap();
        assert!(sat.satisfiable());
        assert!(reduction_holds(&sat).unwrap());
        assert_eq!(sat.to_string(), "(x1 | !x2 | !x2)");
    }
}
