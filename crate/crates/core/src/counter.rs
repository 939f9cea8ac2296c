//! Exact weighted model counting.
//!
//! Two routes are provided and must agree: a brute-force enumerator over all
//! assignments (the oracle, guarded to small formulas) and a DPLL-style
//! search with unit propagation, connected-component decomposition and
//! component caching. Branching picks the highest-occurrence variable with
//! ties broken by lowest index, components are combined in ascending
//! min-variable order and sums accumulate branch-true before branch-false,
//! so repeated runs return bit-identical values.
//!
//! Pure-literal elimination is deliberately absent: under weighted counting
//! it changes counts (both polarities of a pure literal contribute).

use std::collections::HashMap;

use num_complex::Complex64;

use crate::cnf::WeightedCnf;
use crate::parallel;
use crate::Error;

pub const BRUTE_FORCE_VAR_LIMIT: u32 = 26;

/// Which counting route to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Dpll,
    BruteForce,
}

/// An exact count plus search statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountResult {
    pub value: Complex64,
    pub decisions: u64,
    pub propagations: u64,
    pub cache_hits: u64,
}

/// Sums the weights of all satisfying assignments by enumeration.
/// Refuses formulas with more than [`BRUTE_FORCE_VAR_LIMIT`] variables.
pub fn count_bruteforce(f: &WeightedCnf) -> Result<Complex64, Error> {
    let n = f.num_vars();
    if n > BRUTE_FORCE_VAR_LIMIT {
        return Err(Error::VarLimit { vars: n, limit: BRUTE_FORCE_VAR_LIMIT });
    }
    // bit v-1 of an assignment word is variable v
    let clauses: Vec<(u64, u64)> = f
        .clauses()
        .iter()
        .map(|c| {
            let mut pos = 0u64;
            let mut neg = 0u64;
            for lit in c.literals() {
                let bit = 1u64 << (lit.var() - 1);
                if lit.is_positive() {
                    pos |= bit;
                } else {
                    neg |= bit;
                }
            }
            (pos, neg)
        })
        .collect();
    let one = Complex64::new(1.0, 0.0);
    let weighted: Vec<(u64, Complex64, Complex64)> = (1..=n)
        .filter_map(|v| {
            let wp = f.weight(crate::cnf::Literal::positive(v));
            let wn = f.weight(crate::cnf::Literal::negative(v));
            if wp == one && wn == one {
                None
            } else {
                Some((1u64 << (v - 1), wp, wn))
            }
        })
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    'assignments: for a in 0..(1u64 << n) {
        for &(pos, neg) in &clauses {
            if a & pos == 0 && !a & neg == 0 {
                continue 'assignments;
            }
        }
        let mut w = one;
        for &(bit, wp, wn) in &weighted {
            w *= if a & bit != 0 { wp } else { wn };
        }
        total += w;
    }
    Ok(total)
}

/// Exact count by DPLL search. Always terminates; exponential worst case.
pub fn count(f: &WeightedCnf) -> CountResult {
    let n = f.num_vars() as usize;
    let mut wpos = vec![Complex64::new(1.0, 0.0); n + 1];
    let mut wneg = vec![Complex64::new(1.0, 0.0); n + 1];
    for (lit, w) in f.weights() {
        if lit.is_positive() {
            wpos[lit.var() as usize] = w;
        } else {
            wneg[lit.var() as usize] = w;
        }
    }
    let clauses: Vec<Vec<i64>> = f
        .clauses()
        .iter()
        .map(|c| c.literals().iter().map(|l| l.to_dimacs()).collect())
        .collect();
    let mut solver = Dpll {
        wpos,
        wneg,
        cache: HashMap::new(),
        decisions: 0,
        propagations: 0,
        cache_hits: 0,
    };
    let scope: Vec<u32> = (1..=f.num_vars()).collect();
    let value = solver.solve(clauses, scope);
    CountResult {
        value,
        decisions: solver.decisions,
        propagations: solver.propagations,
        cache_hits: solver.cache_hits,
    }
}

/// Runs the selected solver, wrapping the brute-force value in a stats-free
/// [`CountResult`].
pub fn run_solver(f: &WeightedCnf, kind: SolverKind) -> Result<CountResult, Error> {
    match kind {
        SolverKind::Dpll => Ok(count(f)),
        SolverKind::BruteForce => Ok(CountResult {
            value: count_bruteforce(f)?,
            decisions: 0,
            propagations: 0,
            cache_hits: 0,
        }),
    }
}

/// Counts a batch of formulas, in parallel when the `parallel` feature is
/// enabled. Results are positionally identical to the sequential route.
pub fn count_batch(fs: &[WeightedCnf]) -> Vec<CountResult> {
    parallel::batch_map(parallel::default_parallelism(), fs, count)
}

/// Sequential twin of [`count_batch`].
pub fn count_batch_seq(fs: &[WeightedCnf]) -> Vec<CountResult> {
    parallel::batch_map(false, fs, count)
}

#[derive(PartialEq, Eq, Hash)]
struct CompKey {
    clauses: Vec<Vec<i64>>,
    weights: Vec<[u64; 4]>,
}

struct Dpll {
    wpos: Vec<Complex64>,
    wneg: Vec<Complex64>,
    cache: HashMap<CompKey, Complex64>,
    decisions: u64,
    propagations: u64,
    cache_hits: u64,
}

/// Applies a literal: drops satisfied clauses, removes the falsified literal
/// elsewhere. `None` signals an empty clause (the branch counts 0).
fn assign(clauses: &[Vec<i64>], lit: i64) -> Option<Vec<Vec<i64>>> {
    let mut out = Vec::with_capacity(clauses.len());
    for cl in clauses {
        if cl.contains(&lit) {
            continue;
        }
        let ncl: Vec<i64> = cl.iter().copied().filter(|&l| l != -lit).collect();
        if ncl.is_empty() {
            return None;
        }
        out.push(ncl);
    }
    Some(out)
}

impl Dpll {
    fn weight_of(&self, lit: i64) -> Complex64 {
        if lit > 0 {
            self.wpos[lit as usize]
        } else {
            self.wneg[(-lit) as usize]
        }
    }

    fn solve(&mut self, mut clauses: Vec<Vec<i64>>, mut scope: Vec<u32>) -> Complex64 {
        let mut factor = Complex64::new(1.0, 0.0);

        // unit propagation
        while let Some(unit) = clauses.iter().find(|c| c.len() == 1).map(|c| c[0]) {
            self.propagations += 1;
            factor *= self.weight_of(unit);
            scope.retain(|&v| v as i64 != unit.abs());
            match assign(&clauses, unit) {
                Some(next) => clauses = next,
                None => return Complex64::new(0.0, 0.0),
            }
        }

        // clause-free variables contribute the sum of their polarity weights
        let mut occ: HashMap<u32, u32> = HashMap::new();
        for cl in &clauses {
            for &l in cl {
                *occ.entry(l.unsigned_abs() as u32).or_insert(0) += 1;
            }
        }
        for &v in &scope {
            if !occ.contains_key(&v) {
                factor *= self.wpos[v as usize] + self.wneg[v as usize];
            }
        }
        if clauses.is_empty() {
            return factor;
        }
        scope.retain(|v| occ.contains_key(v));

        // connected components of the primal graph
        let comps = split_components(&clauses, &scope);
        let mut result = factor;
        for comp in comps {
            let key = normalize(&comp, &self.wpos, &self.wneg);
            let val = if let Some(&v) = self.cache.get(&key) {
                self.cache_hits += 1;
                v
            } else {
                let v = self.branch(&comp, &occ);
                self.cache.insert(key, v);
                v
            };
            result *= val;
        }
        result
    }

    fn branch(&mut self, comp: &Component, occ: &HashMap<u32, u32>) -> Complex64 {
        self.decisions += 1;
        // highest occurrence, ties by lowest index (vars are sorted ascending)
        let &bv = comp
            .vars
            .iter()
            .max_by_key(|&&v| (occ.get(&v).copied().unwrap_or(0), std::cmp::Reverse(v)))
            .expect("components are nonempty");
        let sub_scope: Vec<u32> = comp.vars.iter().copied().filter(|&v| v != bv).collect();
        let mut total = Complex64::new(0.0, 0.0);
        for lit in [bv as i64, -(bv as i64)] {
            if let Some(sub) = assign(&comp.clauses, lit) {
                total += self.weight_of(lit) * self.solve(sub, sub_scope.clone());
            }
        }
        total
    }
}

struct Component {
    clauses: Vec<Vec<i64>>,
    vars: Vec<u32>, // ascending
}

fn split_components(clauses: &[Vec<i64>], scope: &[u32]) -> Vec<Component> {
    let index: HashMap<u32, usize> =
        scope.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut parent: Vec<usize> = (0..scope.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for cl in clauses {
        let first = index[&(cl[0].unsigned_abs() as u32)];
        for &l in &cl[1..] {
            let a = find(&mut parent, first);
            let b = find(&mut parent, index[&(l.unsigned_abs() as u32)]);
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    // group by root, ordered by the component's smallest variable
    let mut roots: Vec<usize> = Vec::new();
    let mut comp_of_root: HashMap<usize, usize> = HashMap::new();
    let mut comps: Vec<Component> = Vec::new();
    for (i, &v) in scope.iter().enumerate() {
        let r = find(&mut parent, i);
        let ci = *comp_of_root.entry(r).or_insert_with(|| {
            roots.push(r);
            comps.push(Component { clauses: Vec::new(), vars: Vec::new() });
            comps.len() - 1
        });
        comps[ci].vars.push(v);
    }
    for cl in clauses {
        let r = find(&mut parent, index[&(cl[0].unsigned_abs() as u32)]);
        comps[comp_of_root[&r]].clauses.push(cl.clone());
    }
    comps
}

fn normalize(comp: &Component, wpos: &[Complex64], wneg: &[Complex64]) -> CompKey {
    let rank: HashMap<u32, i64> =
        comp.vars.iter().enumerate().map(|(i, &v)| (v, (i + 1) as i64)).collect();
    let mut clauses: Vec<Vec<i64>> = comp
        .clauses
        .iter()
        .map(|cl| {
            let mut c: Vec<i64> = cl
                .iter()
                .map(|&l| {
                    let r = rank[&(l.unsigned_abs() as u32)];
                    if l > 0 {
                        r
                    } else {
                        -r
                    }
                })
                .collect();
            c.sort_unstable_by_key(|l| (l.abs(), *l < 0));
            c
        })
        .collect();
    clauses.sort_unstable();
    let weights: Vec<[u64; 4]> = comp
        .vars
        .iter()
        .map(|&v| {
            let (p, n) = (wpos[v as usize], wneg[v as usize]);
            [p.re.to_bits(), p.im.to_bits(), n.re.to_bits(), n.im.to_bits()]
        })
        .collect();
    CompKey { clauses, weights }
}
