//! Depth-optimal synthesis over a chosen gate set.
//!
//! The template is a stack of layers; a layer assigns every qubit to exactly
//! one gate (identity filling gaps), and a one-hot selector group chooses
//! among all legal layer configurations. Synthesis deepens the template one
//! layer at a time and maximizes the Jamiolkowski fidelity of the candidate
//! against the target; the first depth whose maximum meets the threshold is
//! optimal by construction of the loop.
//!
//! The maximization itself is an exhaustive scan over selector assignments:
//! enumeration order is lexicographic in the per-layer configuration
//! indices, ties keep the earliest candidate, and within one depth the scan
//! parallelizes over the first layer's choice with a deterministic
//! reduction. For up to three qubits candidates are evaluated through
//! cached prefix products of layer unitaries; beyond that each candidate
//! goes through the counting engine. Assignments whose final layer is
//! all-identity are skipped for depth > 1 (they are dominated by the
//! shallower template). The parametric CNF is still built for export to
//! external maximum-model-count solvers via `c max` annotations.

use std::time::Instant;

use crate::circuit::{dagger, Circuit, Gate, GateKind};
use crate::cnf::{Literal, WeightedCnf};
use crate::encoder::{encode_circuit, encode_gate_matrix, identify_frames, QubitFrame};
use crate::equiv::{cyclic_trace, effective_threshold, fidelity_from_trace};
use crate::parallel;
use crate::statevector::{circuit_matrix, UnitaryMatrix};
use crate::Error;

/// Qubit count up to which candidates are evaluated by matrix products.
const MATRIX_SYNTH_LIMIT: usize = 3;

/// The gate alphabet available to the synthesizer. Identity is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct GateSet {
    entries: Vec<GateKind>,
}

impl GateSet {
    /// Entries must be nonempty and of arity 1 or 2 (rotation kinds carry
    /// fixed angles). Explicit identity entries are dropped: every layer
    /// slot may already stay idle.
    pub fn new(entries: Vec<GateKind>) -> Result<GateSet, Error> {
        let mut kept: Vec<GateKind> = Vec::new();
        for e in entries {
            if matches!(e, GateKind::Id) {
                continue;
            }
            if e.arity() > 2 {
                return Err(Error::Synth(format!(
                    "gate {} has arity {}, layer slots support arity 1 and 2",
                    e.name(),
                    e.arity()
                )));
            }
            if !kept.contains(&e) {
                kept.push(e);
            }
        }
        if kept.is_empty() {
            return Err(Error::Synth("gate set must contain at least one gate".into()));
        }
        Ok(GateSet { entries: kept })
    }

    pub fn entries(&self) -> &[GateKind] {
        &self.entries
    }
}

/// One legal layer: every qubit covered exactly once, identity explicit.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerConfig {
    pub gates: Vec<Gate>,
}

/// All maximal assignments of gates to qubits, in deterministic order: at
/// the first uncovered qubit, gate-set entries are tried in declared order
/// (two-qubit kinds with ascending partners, both orientations) and identity
/// last; consequently the all-identity configuration is final.
pub fn enumerate_layer_configs(gs: &GateSet, n: usize) -> Vec<LayerConfig> {
    let mut out = Vec::new();
    let mut covered = vec![false; n];
    let mut current: Vec<Gate> = Vec::new();
    fn recurse(
        gs: &GateSet,
        n: usize,
        covered: &mut Vec<bool>,
        current: &mut Vec<Gate>,
        out: &mut Vec<LayerConfig>,
    ) {
        let Some(q) = (0..n).find(|&q| !covered[q]) else {
            out.push(LayerConfig { gates: current.clone() });
            return;
        };
        covered[q] = true;
        for entry in gs.entries() {
            match entry.arity() {
                1 => {
                    current.push(Gate::new(entry.clone(), vec![q]).expect("valid"));
                    recurse(gs, n, covered, current, out);
                    current.pop();
                }
                2 => {
                    for j in q + 1..n {
                        if covered[j] {
                            continue;
                        }
                        covered[j] = true;
                        for ops in [[q, j], [j, q]] {
                            current.push(Gate::new(entry.clone(), ops.to_vec()).expect("valid"));
                            recurse(gs, n, covered, current, out);
                            current.pop();
                        }
                        covered[j] = false;
                    }
                }
                _ => unreachable!("validated in GateSet::new"),
            }
        }
        current.push(Gate::id(q));
        recurse(gs, n, covered, current, out);
        current.pop();
        covered[q] = false;
    }
    recurse(gs, n, &mut covered, &mut current, &mut out);
    out
}

/// One-hot selector variables of a single layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectorGroup {
    pub vars: Vec<u32>,
}

/// Encodes `depth` parametric layers after `frame`. Each layer gets a fresh
/// output frame shared by all configurations, a one-hot selector group, and
/// per-configuration gate encodings guarded by the negated selector; the
/// entry-indexed encoding is used throughout so every auxiliary can be
/// pinned to its weight-1 polarity while deselected.
pub fn encode_parametric(
    f: &mut WeightedCnf,
    gs: &GateSet,
    n: usize,
    depth: usize,
    frame: &QubitFrame,
) -> Result<(QubitFrame, Vec<SelectorGroup>), Error> {
    if depth == 0 {
        return Err(Error::Synth("template depth must be >= 1".into()));
    }
    if frame.len() != n {
        return Err(Error::SpecLength { expected: n, got: frame.len() });
    }
    let configs = enumerate_layer_configs(gs, n);
    let mut frame = frame.clone();
    let mut groups = Vec::with_capacity(depth);
    for _ in 0..depth {
        let out = QubitFrame::fresh(f, n);
        let selectors: Vec<u32> = (0..configs.len()).map(|_| f.fresh_var()).collect();
        // exactly one configuration per layer
        f.add_lits(&selectors.iter().map(|&v| Literal::positive(v)).collect::<Vec<_>>());
        for i in 0..selectors.len() {
            for j in i + 1..selectors.len() {
                f.add_lits(&[Literal::negative(selectors[i]), Literal::negative(selectors[j])]);
            }
        }
        for (k, config) in configs.iter().enumerate() {
            let guard = Literal::negative(selectors[k]);
            for gate in &config.gates {
                let matrix = gate.kind().matrix();
                let in_vars: Vec<u32> = gate.operands().iter().map(|&q| frame.var(q)).collect();
                let out_vars: Vec<u32> = gate.operands().iter().map(|&q| out.var(q)).collect();
                let enc = encode_gate_matrix(f, &matrix, &in_vars, &out_vars, Some(guard));
                for aux in enc.aux_vars {
                    f.add_lits(&[Literal::positive(selectors[k]), Literal::negative(aux)]);
                }
            }
        }
        groups.push(SelectorGroup { vars: selectors });
        frame = out;
    }
    Ok((frame, groups))
}

/// Builds the cyclic equivalence instance of a `depth`-layer template against
/// `target`, returning the formula and its selector groups.
pub fn build_parametric_instance(
    target: &Circuit,
    gs: &GateSet,
    depth: usize,
) -> Result<(WeightedCnf, Vec<SelectorGroup>), Error> {
    let n = target.qubits();
    let mut f = WeightedCnf::new();
    let q0 = QubitFrame::fresh(&mut f, n);
    let (q1, groups) = encode_parametric(&mut f, gs, n, depth, &q0)?;
    let enc = encode_circuit(&mut f, &dagger(target), &q1)?;
    identify_frames(&mut f, &q0, &enc.frame);
    Ok((f, groups))
}

/// Serializes a parametric instance with `c max` annotations marking the
/// selector variables as optimization variables.
pub fn export_maxcount(f: &WeightedCnf, groups: &[SelectorGroup]) -> Result<String, Error> {
    let vars: Vec<u32> = groups.iter().flat_map(|g| g.vars.iter().copied()).collect();
    if vars.is_empty() {
        return Err(Error::Synth("instance has no selector variables to maximize over".into()));
    }
    Ok(f.to_wdimacs_with_max(&vars))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisProblem {
    pub target: Circuit,
    pub gate_set: GateSet,
    pub epsilon: f64,
    pub max_depth: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationStats {
    pub depth: usize,
    pub candidates: u64,
    pub best_fidelity: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisResult {
    pub circuit: Circuit,
    pub depth: usize,
    pub fidelity: f64,
    pub iterations: usize,
    pub success: bool,
    pub iteration_stats: Vec<IterationStats>,
}

/// Runs the iterative-deepening search; parallel candidate evaluation when
/// the `parallel` feature is on.
pub fn synthesize(problem: &SynthesisProblem) -> Result<SynthesisResult, Error> {
    synthesize_opts(problem, cfg!(feature = "parallel"))
}

pub fn synthesize_opts(problem: &SynthesisProblem, parallel: bool) -> Result<SynthesisResult, Error> {
    if !(0.0..=1.0).contains(&problem.epsilon) {
        return Err(Error::EpsilonRange(problem.epsilon));
    }
    if problem.max_depth == 0 {
        return Err(Error::Synth("max_depth must be >= 1".into()));
    }
    let n = problem.target.qubits();
    let configs = enumerate_layer_configs(&problem.gate_set, n);
    let threshold = effective_threshold(problem.epsilon);
    let evaluator: Box<dyn CandidateEval + Sync> = if n <= MATRIX_SYNTH_LIMIT {
        Box::new(MatrixEval::new(&configs, &problem.target)?)
    } else {
        Box::new(CountingEval { configs: configs.clone(), target: problem.target.clone(), n })
    };

    let mut stats = Vec::new();
    // best across depths: (fidelity, depth, candidate index); ties keep the
    // earliest depth and smallest index
    let mut best_overall: Option<(f64, usize, u64)> = None;
    for depth in 1..=problem.max_depth {
        let t0 = Instant::now();
        let scan = scan_depth(evaluator.as_ref(), configs.len(), depth, parallel)?;
        stats.push(IterationStats {
            depth,
            candidates: scan.candidates,
            best_fidelity: if scan.best_idx.is_some() { scan.best_fid } else { f64::NAN },
            seconds: t0.elapsed().as_secs_f64(),
        });
        if let Some(idx) = scan.best_idx {
            let better = match best_overall {
                None => true,
                Some((fid, _, _)) => scan.best_fid > fid,
            };
            if better {
                best_overall = Some((scan.best_fid, depth, idx));
            }
            if scan.best_fid >= threshold {
                let circuit = circuit_from_index(&configs, depth, idx, n)?;
                let trace = cyclic_trace(&circuit, &problem.target)?;
                let fid = fidelity_from_trace(trace, n)?;
                return Ok(SynthesisResult {
                    circuit,
                    depth,
                    fidelity: fid,
                    iterations: depth,
                    success: true,
                    iteration_stats: stats,
                });
            }
        }
    }
    let (_, depth, idx) = best_overall
        .ok_or_else(|| Error::Synth("search space was empty at every depth".into()))?;
    let circuit = circuit_from_index(&configs, depth, idx, n)?;
    let trace = cyclic_trace(&circuit, &problem.target)?;
    let fid = fidelity_from_trace(trace, n)?;
    Ok(SynthesisResult {
        circuit,
        depth,
        fidelity: fid,
        iterations: problem.max_depth,
        success: false,
        iteration_stats: stats,
    })
}

/// Concatenates the layer configurations selected by a candidate index
/// (lexicographic mixed-radix, first layer most significant).
fn circuit_from_index(
    configs: &[LayerConfig],
    depth: usize,
    idx: u64,
    n: usize,
) -> Result<Circuit, Error> {
    let m = configs.len() as u64;
    let mut gates = Vec::new();
    for layer in 0..depth {
        let digit = (idx / m.pow((depth - 1 - layer) as u32)) % m;
        gates.extend(configs[digit as usize].gates.clone());
    }
    Circuit::new(n, gates)
}

struct ScanOutcome {
    best_fid: f64,
    best_idx: Option<u64>,
    candidates: u64,
}

trait CandidateEval {
    /// Fidelity of every candidate rooted at first-layer config `i0`,
    /// reduced to the task-local best. `skip_last` is the config index to
    /// skip in the final layer (all-identity), if any.
    fn scan_root(&self, i0: usize, depth: usize, skip_last: Option<usize>) -> TaskBest;
}

#[derive(Clone, Copy)]
struct TaskBest {
    fid: f64,
    idx: Option<u64>,
    count: u64,
}

fn scan_depth(
    eval: &(dyn CandidateEval + Sync),
    m: usize,
    depth: usize,
    parallel: bool,
) -> Result<ScanOutcome, Error> {
    let skip_last = if depth > 1 { Some(m - 1) } else { None };
    let roots: Vec<usize> = (0..m).collect();
    let task_results =
        parallel::batch_map(parallel, &roots, |&i0| eval.scan_root(i0, depth, skip_last));
    let mut best = TaskBest { fid: f64::NEG_INFINITY, idx: None, count: 0 };
    for t in task_results {
        best.count += t.count;
        let wins = match (t.idx, best.idx) {
            (None, _) => false,
            (Some(_), None) => true,
            (Some(ti), Some(bi)) => t.fid > best.fid || (t.fid == best.fid && ti < bi),
        };
        if wins {
            best.fid = t.fid;
            best.idx = t.idx;
        }
    }
    Ok(ScanOutcome { best_fid: best.fid, best_idx: best.idx, candidates: best.count })
}

/// Prefix-product evaluation through the dense matrix oracle.
struct MatrixEval {
    config_mats: Vec<UnitaryMatrix>,
    target_adj: UnitaryMatrix,
    dim_sq: f64,
}

impl MatrixEval {
    fn new(configs: &[LayerConfig], target: &Circuit) -> Result<MatrixEval, Error> {
        let n = target.qubits();
        let config_mats = configs
            .iter()
            .map(|cfg| circuit_matrix(&Circuit::new(n, cfg.gates.clone())?))
            .collect::<Result<Vec<_>, _>>()?;
        let target_adj = circuit_matrix(target)?.adjoint();
        let dim = 1u64 << n;
        Ok(MatrixEval { config_mats, target_adj, dim_sq: (dim * dim) as f64 })
    }

    fn dfs(&self, prefix: &UnitaryMatrix, level: usize, depth: usize, idx: u64, skip_last: Option<usize>, best: &mut TaskBest) {
        let m = self.config_mats.len();
        if level == depth - 1 {
            for (k, mat) in self.config_mats.iter().enumerate() {
                if skip_last == Some(k) {
                    continue;
                }
                let trace = mat.trace_of_product(prefix);
                let fid = trace.norm_sqr() / self.dim_sq;
                best.count += 1;
                if best.idx.is_none() || fid > best.fid {
                    best.fid = fid;
                    best.idx = Some(idx * m as u64 + k as u64);
                }
            }
            return;
        }
        for (k, mat) in self.config_mats.iter().enumerate() {
            let next = mat.mul(prefix);
            self.dfs(&next, level + 1, depth, idx * m as u64 + k as u64, skip_last, best);
        }
    }
}

impl CandidateEval for MatrixEval {
    fn scan_root(&self, i0: usize, depth: usize, skip_last: Option<usize>) -> TaskBest {
        let mut best = TaskBest { fid: f64::NEG_INFINITY, idx: None, count: 0 };
        if depth == 1 {
            if skip_last != Some(i0) {
                let trace = self.config_mats[i0].trace_of_product(&self.target_adj);
                best.fid = trace.norm_sqr() / self.dim_sq;
                best.idx = Some(i0 as u64);
                best.count = 1;
            }
            return best;
        }
        let prefix = self.config_mats[i0].mul(&self.target_adj);
        self.dfs(&prefix, 1, depth, i0 as u64, skip_last, &mut best);
        best
    }
}

/// Per-candidate evaluation through the counting engine (larger registers).
struct CountingEval {
    configs: Vec<LayerConfig>,
    target: Circuit,
    n: usize,
}

impl CountingEval {
    fn eval(&self, stack: &[usize]) -> f64 {
        let mut gates = Vec::new();
        for &k in stack {
            gates.extend(self.configs[k].gates.clone());
        }
        let cand = Circuit::new(self.n, gates).expect("configs are in range");
        let trace = cyclic_trace(&cand, &self.target).expect("same register");
        trace.norm_sqr() / ((1u64 << (2 * self.n)) as f64)
    }

    fn dfs(&self, stack: &mut Vec<usize>, depth: usize, idx: u64, skip_last: Option<usize>, best: &mut TaskBest) {
        let m = self.configs.len();
        if stack.len() == depth - 1 {
            for k in 0..m {
                if skip_last == Some(k) {
                    continue;
                }
                stack.push(k);
                let fid = self.eval(stack);
                stack.pop();
                best.count += 1;
                if best.idx.is_none() || fid > best.fid {
                    best.fid = fid;
                    best.idx = Some(idx * m as u64 + k as u64);
                }
            }
            return;
        }
        for k in 0..m {
            stack.push(k);
            self.dfs(stack, depth, idx * m as u64 + k as u64, skip_last, best);
            stack.pop();
        }
    }
}

impl CandidateEval for CountingEval {
    fn scan_root(&self, i0: usize, depth: usize, skip_last: Option<usize>) -> TaskBest {
        let mut best = TaskBest { fid: f64::NEG_INFINITY, idx: None, count: 0 };
        if depth == 1 {
            if skip_last != Some(i0) {
                best.fid = self.eval(&[i0]);
                best.idx = Some(i0 as u64);
                best.count = 1;
            }
            return best;
        }
        let mut stack = vec![i0];
        self.dfs(&mut stack, depth, i0 as u64, skip_last, &mut best);
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counter::count;
    use crate::encoder::encode_circuit;
    use crate::equiv::fidelity;

    fn gs(kinds: Vec<GateKind>) -> GateSet {
        GateSet::new(kinds).unwrap()
    }

    #[test]
    fn config_enumeration_single_qubit() {
        let configs = enumerate_layer_configs(&gs(vec![GateKind::H, GateKind::T]), 1);
        assert_eq!(configs.len(), 3);
        assert_eq!(configs[0].gates, vec![Gate::h(0)]);
        assert_eq!(configs[1].gates, vec![Gate::t(0)]);
        assert_eq!(configs[2].gates, vec![Gate::id(0)]);
    }

    #[test]
    fn config_enumeration_cx_orientations() {
        let configs = enumerate_layer_configs(&gs(vec![GateKind::Cx]), 2);
        assert_eq!(configs.len(), 3);
        assert_eq!(configs[0].gates, vec![Gate::cx(0, 1)]);
        assert_eq!(configs[1].gates, vec![Gate::cx(1, 0)]);
        assert_eq!(configs[2].gates, vec![Gate::id(0), Gate::id(1)]);
    }

    #[test]
    fn config_enumeration_parallel_singles() {
        let configs = enumerate_layer_configs(&gs(vec![GateKind::H]), 2);
        let expect: Vec<Vec<Gate>> = vec![
            vec![Gate::h(0), Gate::h(1)],
            vec![Gate::h(0), Gate::id(1)],
            vec![Gate::id(0), Gate::h(1)],
            vec![Gate::id(0), Gate::id(1)],
        ];
        assert_eq!(configs.iter().map(|c| c.gates.clone()).collect::<Vec<_>>(), expect);
    }

    #[test]
    fn all_identity_config_is_last() {
        for (kinds, n) in [
            (vec![GateKind::H, GateKind::Cx], 3),
            (vec![GateKind::Cx, GateKind::Csx, GateKind::Csxdg, GateKind::H], 3),
            (vec![GateKind::T], 1),
        ] {
            let configs = enumerate_layer_configs(&gs(kinds), n);
            let last = configs.last().unwrap();
            assert!(last.gates.iter().all(|g| matches!(g.kind(), GateKind::Id)));
            assert_eq!(
                configs.iter().filter(|c| c.gates.iter().all(|g| matches!(g.kind(), GateKind::Id))).count(),
                1
            );
        }
    }

    #[test]
    fn parametric_depth_zero_rejected() {
        let mut f = WeightedCnf::new();
        let frame = QubitFrame::fresh(&mut f, 1);
        assert!(encode_parametric(&mut f, &gs(vec![GateKind::H]), 1, 0, &frame).is_err());
    }

    #[test]
    fn parametric_one_layer_one_hot_shape() {
        let mut f = WeightedCnf::new();
        let frame = QubitFrame::fresh(&mut f, 1);
        let (_, groups) =
            encode_parametric(&mut f, &gs(vec![GateKind::H, GateKind::T]), 1, 1, &frame).unwrap();
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].vars.len(), 3);
        // exactly-one: one cover clause plus pairwise exclusions among the
        // selectors must be present
        let sel = &groups[0].vars;
        let cover = f.clauses().iter().any(|c| {
            c.literals().len() == sel.len()
                && sel.iter().all(|&v| c.literals().contains(&Literal::positive(v)))
        });
        assert!(cover);
    }

    #[test]
    fn fixed_selector_assignment_reduces_to_concrete_circuit() {
        // parametric encoding restricted to an assignment counts identically
        // to the concrete circuit encoding
        for seed in 0..100u64 {
            let mut rng = crate::random::rng(seed.wrapping_mul(97).wrapping_add(13));
            use rand::Rng;
            let n = rng.random_range(1..=2usize);
            let depth = rng.random_range(1..=2usize);
            let set = gs(vec![GateKind::H, GateKind::T, GateKind::Cx]);
            let configs = enumerate_layer_configs(&set, n);

            let mut f = WeightedCnf::new();
            let q0 = QubitFrame::fresh(&mut f, n);
            let (_, groups) = encode_parametric(&mut f, &set, n, depth, &q0).unwrap();
            let mut gates = Vec::new();
            for g in &groups {
                let pick = rng.random_range(0..g.vars.len());
                for (i, &v) in g.vars.iter().enumerate() {
                    let lit =
                        if i == pick { Literal::positive(v) } else { Literal::negative(v) };
                    f.add_lits(&[lit]);
                }
                gates.extend(configs[pick].gates.clone());
            }
            let parametric = count(&f).value;

            let mut f2 = WeightedCnf::new();
            let q0b = QubitFrame::fresh(&mut f2, n);
            encode_circuit(&mut f2, &Circuit::new(n, gates).unwrap(), &q0b).unwrap();
            let concrete = count(&f2).value;
            assert!(
                (parametric - concrete).norm() <= 1e-12,
                "seed {seed}: {parametric} vs {concrete}"
            );
        }
    }

    #[test]
    fn synthesizes_s_from_h_t_at_depth_two() {
        let problem = SynthesisProblem {
            target: Circuit::new(1, vec![Gate::s(0)]).unwrap(),
            gate_set: gs(vec![GateKind::H, GateKind::T]),
            epsilon: 0.0,
            max_depth: 4,
        };
        let r = synthesize(&problem).unwrap();
        assert!(r.success);
        assert_eq!(r.depth, 2);
        assert_eq!(r.iterations, 2);
        assert_eq!(r.circuit.gates(), &[Gate::t(0), Gate::t(0)]);
        assert!(r.fidelity >= 1.0 - 1e-9);
        assert_eq!(crate::circuit::layers(&r.circuit).len(), r.depth);
    }

    #[test]
    fn synthesizes_swap_from_cx_at_depth_three() {
        let target =
            Circuit::new(2, vec![Gate::cx(0, 1), Gate::cx(1, 0), Gate::cx(0, 1)]).unwrap();
        let problem = SynthesisProblem {
            target: target.clone(),
            gate_set: gs(vec![GateKind::Cx]),
            epsilon: 0.0,
            max_depth: 5,
        };
        let r = synthesize(&problem).unwrap();
        assert!(r.success);
        assert_eq!(r.depth, 3);
        assert_eq!(r.circuit.gates(), target.gates());
        assert!(r.fidelity >= 1.0 - 1e-9);
    }

    #[test]
    fn exhausted_depth_reports_best_effort() {
        let problem = SynthesisProblem {
            target: Circuit::new(1, vec![Gate::s(0)]).unwrap(),
            gate_set: gs(vec![GateKind::H, GateKind::T]),
            epsilon: 0.0,
            max_depth: 1,
        };
        let r = synthesize(&problem).unwrap();
        assert!(!r.success);
        assert_eq!(r.iterations, 1);
        // T is the best depth-1 approximation of S
        assert_eq!(r.circuit.gates(), &[Gate::t(0)]);
        let expect = fidelity(&r.circuit, &problem.target).unwrap();
        assert!((r.fidelity - expect).abs() <= 1e-12);
    }

    #[test]
    fn reported_fidelity_matches_recomputation() {
        let problem = SynthesisProblem {
            target: Circuit::new(1, vec![Gate::s(0)]).unwrap(),
            gate_set: gs(vec![GateKind::H, GateKind::T]),
            epsilon: 0.0,
            max_depth: 3,
        };
        let r = synthesize(&problem).unwrap();
        let recomputed = fidelity(&r.circuit, &problem.target).unwrap();
        assert!((r.fidelity - recomputed).abs() <= 1e-9);
    }

    #[test]
    fn depth_is_monotone_in_epsilon() {
        let target = Circuit::new(1, vec![Gate::s(0)]).unwrap();
        let set = gs(vec![GateKind::H, GateKind::T]);
        let mut last_depth = usize::MAX;
        for eps in [0.0, 0.13, 0.2, 0.6] {
            let r = synthesize(&SynthesisProblem {
                target: target.clone(),
                gate_set: set.clone(),
                epsilon: eps,
                max_depth: 4,
            })
            .unwrap();
            assert!(r.success);
            assert!(r.depth <= last_depth, "depth grew at epsilon {eps}");
            last_depth = r.depth;
        }
    }

    #[test]
    fn parallel_and_sequential_scans_agree() {
        let problem = SynthesisProblem {
            target: Circuit::new(2, vec![Gate::cx(0, 1), Gate::cx(1, 0), Gate::cx(0, 1)]).unwrap(),
            gate_set: gs(vec![GateKind::Cx, GateKind::H]),
            epsilon: 0.0,
            max_depth: 3,
        };
        let a = synthesize_opts(&problem, true).unwrap();
        let b = synthesize_opts(&problem, false).unwrap();
        assert_eq!(a.circuit, b.circuit);
        assert_eq!(a.depth, b.depth);
        assert_eq!(a.fidelity.to_bits(), b.fidelity.to_bits());
    }

    #[test]
    fn export_contains_max_annotations() {
        let target = Circuit::new(1, vec![Gate::s(0)]).unwrap();
        let set = gs(vec![GateKind::H, GateKind::T]);
        let (f, groups) = build_parametric_instance(&target, &set, 1).unwrap();
        let text = export_maxcount(&f, &groups).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("c max ")).count(), 3);
        let (parsed, max_vars) = WeightedCnf::from_wdimacs(&text).unwrap();
        assert_eq!(max_vars.len(), 3);
        assert_eq!(parsed.num_vars(), f.num_vars());

        let (f2, groups2) = build_parametric_instance(&target, &set, 2).unwrap();
        assert_eq!(groups2.len(), 2);
        let text2 = export_maxcount(&f2, &groups2).unwrap();
        assert_eq!(text2.lines().filter(|l| l.starts_with("c max ")).count(), 6);
    }

    #[test]
    fn export_without_selectors_rejected() {
        let f = WeightedCnf::new();
        assert!(export_maxcount(&f, &[]).is_err());
    }

    #[test]
    fn gate_set_validation() {
        assert!(GateSet::new(vec![]).is_err());
        assert!(GateSet::new(vec![GateKind::Id]).is_err());
        assert!(GateSet::new(vec![GateKind::Ccx]).is_err());
        let set = GateSet::new(vec![GateKind::H, GateKind::H, GateKind::Id, GateKind::T]).unwrap();
        assert_eq!(set.entries(), &[GateKind::H, GateKind::T]);
    }
}
