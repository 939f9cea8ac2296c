//! Complex-weighted CNF formulas and their weighted DIMACS form.
//!
//! Weights are stored sparsely: a literal without an entry weighs 1. The
//! serialized dialect follows the model-counting competition layout extended
//! with an imaginary part:
//!
//! ```text
//! c t wmc
//! p cnf <vars> <clauses>
//! c max <var>                      (optional, optimization variables)
//! c p weight <lit> <re> <im> 0
//! <lit> ... <lit> 0
//! ```
//!
//! Floats are printed in shortest round-trip decimal, clauses keep insertion
//! order and weight lines are sorted by variable (positive literal first), so
//! write -> parse -> write is byte-identical.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

/// A variable index (>= 1) with a polarity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    var: u32,
    positive: bool,
}

impl Literal {
    pub fn positive(var: u32) -> Literal {
        assert!(var >= 1, "variable indices start at 1");
        Literal { var, positive: true }
    }

    pub fn negative(var: u32) -> Literal {
        assert!(var >= 1, "variable indices start at 1");
        Literal { var, positive: false }
    }

    pub fn var(&self) -> u32 {
        self.var
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    pub fn negated(&self) -> Literal {
        Literal { var: self.var, positive: !self.positive }
    }

    pub fn to_dimacs(&self) -> i64 {
        if self.positive {
            self.var as i64
        } else {
            -(self.var as i64)
        }
    }

    pub fn from_dimacs(lit: i64) -> Result<Literal, CnfError> {
        if lit == 0 || lit.unsigned_abs() > u32::MAX as u64 {
            return Err(CnfError::Parse { line: 0, message: format!("bad literal {lit}") });
        }
        Ok(Literal { var: lit.unsigned_abs() as u32, positive: lit > 0 })
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// A nonempty, non-tautological disjunction of literals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clause(Vec<Literal>);

// clauses are nonempty by construction, so no is_empty()
#[allow(clippy::len_without_is_empty)]
impl Clause {
    /// Deduplicates literals (keeping first occurrence order); rejects empty
    /// clauses and tautologies.
    pub fn new(lits: Vec<Literal>) -> Result<Clause, CnfError> {
        if lits.is_empty() {
            return Err(CnfError::EmptyClause);
        }
        let mut seen: Vec<Literal> = Vec::with_capacity(lits.len());
        for lit in lits {
            if seen.contains(&lit.negated()) {
                return Err(CnfError::Tautology(lit.var()));
            }
            if !seen.contains(&lit) {
                seen.push(lit);
            }
        }
        Ok(Clause(seen))
    }

    pub fn literals(&self) -> &[Literal] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum CnfError {
    #[error("empty clause")]
    EmptyClause,
    #[error("tautological clause on variable {0}")]
    Tautology(u32),
    #[error("variable {0} has not been allocated")]
    UnallocatedVar(u32),
    #[error("weight must be finite")]
    NonFiniteWeight,
    #[error("wdimacs line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// A CNF formula with a fresh-variable allocator and a sparse complex weight
/// map over literals.
///
/// Construction is single-writer; a finished formula is immutable and can be
/// shared freely across threads.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightedCnf {
    num_vars: u32,
    clauses: Vec<Clause>,
    weights: BTreeMap<Literal, Complex64>,
}

impl WeightedCnf {
    pub fn new() -> WeightedCnf {
        WeightedCnf::default()
    }

    /// Allocates and returns the next variable index; indices are contiguous
    /// starting at 1 and never reused.
    pub fn fresh_var(&mut self) -> u32 {
        self.num_vars += 1;
        self.num_vars
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn add_clause(&mut self, clause: Clause) -> Result<(), CnfError> {
        if let Some(lit) = clause.literals().iter().find(|l| l.var() > self.num_vars) {
            return Err(CnfError::UnallocatedVar(lit.var()));
        }
        self.clauses.push(clause);
        Ok(())
    }

    /// Builds and appends a clause from literals. Panics on structurally
    /// invalid input; encoder-generated clauses are well-formed by
    /// construction.
    pub(crate) fn add_lits(&mut self, lits: &[Literal]) {
        let clause = Clause::new(lits.to_vec()).expect("well-formed clause");
        self.add_clause(clause).expect("allocated variables");
    }

    pub fn set_weight(&mut self, lit: Literal, w: Complex64) -> Result<(), CnfError> {
        if lit.var() > self.num_vars {
            return Err(CnfError::UnallocatedVar(lit.var()));
        }
        if !w.re.is_finite() || !w.im.is_finite() {
            return Err(CnfError::NonFiniteWeight);
        }
        self.weights.insert(lit, w);
        Ok(())
    }

    /// Weight of a literal; unlisted literals weigh 1.
    pub fn weight(&self, lit: Literal) -> Complex64 {
        self.weights.get(&lit).copied().unwrap_or(Complex64::new(1.0, 0.0))
    }

    pub fn stored_weight(&self, lit: Literal) -> Option<Complex64> {
        self.weights.get(&lit).copied()
    }

    pub fn weights(&self) -> impl Iterator<Item = (Literal, Complex64)> + '_ {
        self.weights.iter().map(|(l, w)| (*l, *w))
    }

    pub fn to_wdimacs(&self) -> String {
        self.to_wdimacs_with_max(&[])
    }

    /// Serializes the formula; `max_vars` are emitted as `c max` lines marking
    /// optimization variables for maximum-model-count solvers.
    pub fn to_wdimacs_with_max(&self, max_vars: &[u32]) -> String {
        let mut out = String::new();
        out.push_str("c t wmc\n");
        out.push_str(&format!("p cnf {} {}\n", self.num_vars, self.clauses.len()));
        let mut max_sorted: Vec<u32> = max_vars.to_vec();
        max_sorted.sort_unstable();
        max_sorted.dedup();
        for v in max_sorted {
            out.push_str(&format!("c max {v}\n"));
        }
        let mut entries: Vec<(Literal, Complex64)> = self.weights().collect();
        entries.sort_by_key(|(l, _)| (l.var(), !l.is_positive()));
        for (lit, w) in entries {
            out.push_str(&format!("c p weight {} {} {} 0\n", lit, w.re, w.im));
        }
        for clause in &self.clauses {
            for lit in clause.literals() {
                out.push_str(&format!("{lit} "));
            }
            out.push_str("0\n");
        }
        out
    }

    /// Parses the dialect produced by [`WeightedCnf::to_wdimacs_with_max`].
    /// Returns the formula and any `c max` variables.
    pub fn from_wdimacs(text: &str) -> Result<(WeightedCnf, Vec<u32>), CnfError> {
        let mut f = WeightedCnf::new();
        let mut max_vars = Vec::new();
        let mut seen_header = false;
        let mut pending: Vec<Literal> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let lineno = i + 1;
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let parse_err =
                |message: String| CnfError::Parse { line: lineno, message };
            if let Some(rest) = line.strip_prefix("c ") {
                let toks: Vec<&str> = rest.split_whitespace().collect();
                match toks.as_slice() {
                    ["max", v] => {
                        let v: u32 =
                            v.parse().map_err(|_| parse_err(format!("bad variable '{v}'")))?;
                        max_vars.push(v);
                    }
                    ["p", "weight", lit, re, im, "0"] => {
                        let lit: i64 =
                            lit.parse().map_err(|_| parse_err(format!("bad literal '{lit}'")))?;
                        let re: f64 =
                            re.parse().map_err(|_| parse_err(format!("bad number '{re}'")))?;
                        let im: f64 =
                            im.parse().map_err(|_| parse_err(format!("bad number '{im}'")))?;
                        let lit = Literal::from_dimacs(lit)?;
                        f.set_weight(lit, Complex64::new(re, im)).map_err(|e| match e {
                            CnfError::UnallocatedVar(v) => {
                                parse_err(format!("weight on unallocated variable {v}"))
                            }
                            other => other,
                        })?;
                    }
                    _ => {} // other comments are skipped
                }
                continue;
            }
            if line == "c" {
                continue;
            }
            if let Some(rest) = line.strip_prefix("p ") {
                if seen_header {
                    return Err(parse_err("duplicate p line".into()));
                }
                let toks: Vec<&str> = rest.split_whitespace().collect();
                if toks.len() != 3 || toks[0] != "cnf" {
                    return Err(parse_err(format!("bad problem line 'p {rest}'")));
                }
                let vars: u32 =
                    toks[1].parse().map_err(|_| parse_err(format!("bad count '{}'", toks[1])))?;
                f.num_vars = vars;
                seen_header = true;
                continue;
            }
            if !seen_header {
                return Err(parse_err("clause before p line".into()));
            }
            for tok in line.split_whitespace() {
                let lit: i64 =
                    tok.parse().map_err(|_| parse_err(format!("bad literal '{tok}'")))?;
                if lit == 0 {
                    let clause = Clause::new(std::mem::take(&mut pending))?;
                    f.add_clause(clause)?;
                } else {
                    pending.push(Literal::from_dimacs(lit)?);
                }
            }
        }
        if !seen_header {
            return Err(CnfError::Parse { line: 0, message: "missing p line".into() });
        }
        if !pending.is_empty() {
            return Err(CnfError::Parse { line: 0, message: "unterminated clause".into() });
        }
        Ok((f, max_vars))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lit(v: i64) -> Literal {
        Literal::from_dimacs(v).unwrap()
    }

    #[test]
    fn fresh_var_is_sequential() {
        let mut f = WeightedCnf::new();
        assert_eq!(f.fresh_var(), 1);
        for _ in 0..4 {
            f.fresh_var();
        }
        assert_eq!(f.fresh_var(), 6);
        let a = f.fresh_var();
        let b = f.fresh_var();
        assert_ne!(a, b);
    }

    #[test]
    fn add_clause_appends() {
        let mut f = WeightedCnf::new();
        f.fresh_var();
        f.fresh_var();
        f.add_clause(Clause::new(vec![lit(1), lit(-2)]).unwrap()).unwrap();
        assert_eq!(f.clauses().len(), 1);
    }

    #[test]
    fn duplicate_literals_are_deduplicated() {
        let c = Clause::new(vec![lit(1), lit(1)]).unwrap();
        assert_eq!(c.literals(), &[lit(1)]);
    }

    #[test]
    fn tautology_rejected() {
        assert_eq!(Clause::new(vec![lit(1), lit(-1)]), Err(CnfError::Tautology(1)));
        assert_eq!(Clause::new(vec![]), Err(CnfError::EmptyClause));
    }

    #[test]
    fn unallocated_vars_rejected() {
        let mut f = WeightedCnf::new();
        f.fresh_var();
        let c = Clause::new(vec![lit(2)]).unwrap();
        assert_eq!(f.add_clause(c), Err(CnfError::UnallocatedVar(2)));
        assert_eq!(
            f.set_weight(lit(5), Complex64::new(1.0, 0.0)),
            Err(CnfError::UnallocatedVar(5))
        );
    }

    #[test]
    fn weights_default_to_one_and_polarities_are_independent() {
        let mut f = WeightedCnf::new();
        let h = f.fresh_var();
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        f.set_weight(Literal::negative(h), Complex64::new(inv_sqrt2, 0.0)).unwrap();
        assert_eq!(f.weight(Literal::negative(h)), Complex64::new(inv_sqrt2, 0.0));
        assert_eq!(f.weight(Literal::positive(h)), Complex64::new(1.0, 0.0));
        // negative and complex weights are accepted
        f.set_weight(Literal::positive(h), Complex64::new(-inv_sqrt2, 0.0)).unwrap();
        assert_eq!(f.weight(Literal::positive(h)), Complex64::new(-inv_sqrt2, 0.0));
        let phase = Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
        f.set_weight(Literal::positive(h), phase).unwrap();
        assert_eq!(f.weight(Literal::positive(h)), phase);
        assert_eq!(
            f.set_weight(Literal::positive(h), Complex64::new(f64::NAN, 0.0)),
            Err(CnfError::NonFiniteWeight)
        );
    }

    #[test]
    fn wdimacs_of_empty_formula() {
        let f = WeightedCnf::new();
        assert_eq!(f.to_wdimacs(), "c t wmc\np cnf 0 0\n");
    }

    #[test]
    fn wdimacs_single_clause_with_weight() {
        let mut f = WeightedCnf::new();
        let x = f.fresh_var();
        f.add_clause(Clause::new(vec![Literal::positive(x)]).unwrap()).unwrap();
        f.set_weight(Literal::negative(x), Complex64::new(0.5, 0.0)).unwrap();
        assert_eq!(f.to_wdimacs(), "c t wmc\np cnf 1 1\nc p weight -1 0.5 0 0\n1 0\n");
    }

    #[test]
    fn wdimacs_parse_back_reproduces_formula() {
        let mut f = WeightedCnf::new();
        for _ in 0..3 {
            f.fresh_var();
        }
        f.add_clause(Clause::new(vec![lit(1), lit(-3)]).unwrap()).unwrap();
        f.add_clause(Clause::new(vec![lit(2)]).unwrap()).unwrap();
        f.set_weight(lit(3), Complex64::new(-0.25, 1.5)).unwrap();
        f.set_weight(lit(-3), Complex64::new(0.125, 0.0)).unwrap();
        let text = f.to_wdimacs();
        let (back, max) = WeightedCnf::from_wdimacs(&text).unwrap();
        assert_eq!(back, f);
        assert!(max.is_empty());
    }

    #[test]
    fn wdimacs_max_lines_roundtrip() {
        let mut f = WeightedCnf::new();
        let a = f.fresh_var();
        let b = f.fresh_var();
        f.add_clause(Clause::new(vec![Literal::positive(a), Literal::positive(b)]).unwrap())
            .unwrap();
        let text = f.to_wdimacs_with_max(&[b, a]);
        assert!(text.contains("c max 1\nc max 2\n"));
        let (back, max) = WeightedCnf::from_wdimacs(&text).unwrap();
        assert_eq!(back, f);
        assert_eq!(max, vec![1, 2]);
    }

    proptest! {
        // write . parse . write is byte-identical
        #[test]
        fn canonical_serialization(seed in 0u64..300) {
            let mut rng = crate::random::rng(seed.wrapping_add(777));
            let f = crate::random::random_formula(&mut rng, 12, 20);
            let once = f.to_wdimacs();
            let (parsed, _) = WeightedCnf::from_wdimacs(&once).unwrap();
            let twice = parsed.to_wdimacs();
            prop_assert_eq!(once, twice);
        }
    }
}
