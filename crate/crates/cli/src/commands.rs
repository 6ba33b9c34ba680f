use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{bail, Context, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use fermroute::circuit::Gate;
use fermroute::metering::{self, Construction};
use fermroute::oracle::UNITARY_MAX_QUBITS;
use fermroute::routing::ceil_log2;
use fermroute::trotter::{emit_trotter_circuit, fft_permutation_skeleton, plan_layers, skeleton_circuit};
use fermroute::verify::{self, VerifyResult};
use fermroute::{
    decompose_staircase, synthesize_permutation, transform_between, Circuit, Hamiltonian,
    Permutation, TernaryTree,
};

use crate::{input, DepthScanArgs, FftArgs, Level, RouteArgs, TransformArgs, TrotterArgs, VerifyArgs};

/// Largest mode count accepted by `route --exhaustive`.
const EXHAUSTIVE_MAX_MODES: usize = 8;

#[derive(Serialize)]
struct CircuitStats {
    num_qubits: usize,
    gates: usize,
    primitive_depth: usize,
    cnot_layers: usize,
    gate_counts: BTreeMap<&'static str, usize>,
}

impl CircuitStats {
    fn of(c: &Circuit) -> Self {
        let p = c.expand_macros();
        let mut gate_counts = BTreeMap::new();
        for g in p.gates() {
            *gate_counts.entry(g.name()).or_insert(0) += 1;
        }
        CircuitStats {
            num_qubits: p.num_qubits(),
            gates: p.len(),
            primitive_depth: p.depth(true).expect("expanded"),
            cnot_layers: p.layers_containing(|g| matches!(g, Gate::Cnot(..))),
            gate_counts,
        }
    }
}

fn level_name(level: Level) -> &'static str {
    match level {
        Level::None => "none",
        Level::Symbolic => "symbolic",
        Level::Statevector => "statevector",
    }
}

fn require_dense(level: Level, n: usize) -> Result<()> {
    if level == Level::Statevector && n > UNITARY_MAX_QUBITS {
        bail!("statevector verification is limited to {UNITARY_MAX_QUBITS} qubits, got {n}");
    }
    Ok(())
}

/// `None` when not requested; otherwise pass or fail, with the reason on stderr.
fn outcome(level: Level, run: impl FnOnce(Level) -> VerifyResult<()>) -> Option<bool> {
    if level == Level::None {
        return None;
    }
    match run(level) {
        Ok(()) => Some(true),
        Err(e) => {
            eprintln!("verification failed: {e}");
            Some(false)
        }
    }
}

fn check_routing(c: &Circuit, sigma: &Permutation, level: Level) -> Option<bool> {
    outcome(level, |l| match l {
        Level::Statevector => verify::routing_statevector(c, sigma),
        _ => verify::routing_symbolic(c, sigma),
    })
}

fn check_transform(c: &Circuit, src: &TernaryTree, dst: &TernaryTree, level: Level) -> Option<bool> {
    outcome(level, |l| match l {
        Level::Statevector => verify::transform_statevector(c, src, dst),
        _ => verify::transform_symbolic(c, src, dst),
    })
}

#[derive(Serialize)]
struct Verification {
    level: &'static str,
    passed: Option<bool>,
}

impl Verification {
    fn new(level: Level, passed: Option<bool>) -> Self {
        Verification {
            level: level_name(level),
            passed,
        }
    }

    fn ok(&self) -> bool {
        self.passed != Some(false)
    }
}

fn stdout_closed(e: &io::Error) -> bool {
    e.kind() == io::ErrorKind::BrokenPipe
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    match writeln!(io::stdout().lock(), "{text}") {
        Err(e) if !stdout_closed(&e) => Err(e.into()),
        _ => Ok(()),
    }
}

fn write_circuit(path: Option<&Path>, c: &Circuit) -> Result<()> {
    if let Some(p) = path {
        fs::write(p, c.to_string()).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn write_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    if let Some(p) = path {
        let text = serde_json::to_string_pretty(value)? + "\n";
        fs::write(p, text).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn log2_sq(n: usize) -> f64 {
    (ceil_log2(n).max(1) as f64).powi(2)
}

#[derive(Serialize)]
struct RouteReport {
    sigma_is_identity: bool,
    staircase_layers: usize,
    staircases: usize,
    #[serde(flatten)]
    stats: CircuitStats,
    depth_per_log2_sq: f64,
    verification: Verification,
}

#[derive(Serialize)]
struct ExhaustiveReport {
    num_modes: usize,
    permutations: usize,
    verified: usize,
    level: &'static str,
    max_primitive_depth: usize,
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for k in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..=k).map(move |at| {
                    let mut q = p.clone();
                    q.insert(at, k);
                    q
                })
            })
            .collect();
    }
    out.sort();
    out
}

pub fn route(a: RouteArgs) -> Result<bool> {
    let level = a.common.verify;
    if a.exhaustive {
        let n = a.n.expect("clap enforces --n");
        if n > EXHAUSTIVE_MAX_MODES {
            bail!("--exhaustive is limited to {EXHAUSTIVE_MAX_MODES} modes");
        }
        require_dense(level, n)?;
        let perms = all_permutations(n);
        let mut verified = 0;
        let mut max_depth = 0;
        for p in &perms {
            let sigma = Permutation::new(p.clone())?;
            let c = synthesize_permutation(&sigma);
            max_depth = max_depth.max(c.expand_macros().depth(true)?);
            if check_routing(&c, &sigma, level) == Some(true) {
                verified += 1;
            }
        }
        let report = ExhaustiveReport {
            num_modes: n,
            permutations: perms.len(),
            verified,
            level: level_name(level),
            max_primitive_depth: max_depth,
        };
        print_json(&report)?;
        return Ok(level == Level::None || verified == perms.len());
    }
    let sigma = match (&a.sigma, a.n) {
        (Some(path), _) => input::permutation(path)?,
        (None, Some(n)) => Permutation::random(n, &mut ChaCha8Rng::seed_from_u64(a.common.seed)),
        (None, None) => bail!("give a permutation file or --n for a random one"),
    };
    if let Some(n) = a.n.filter(|&n| n != sigma.len()) {
        bail!("permutation has {} modes but --n is {n}", sigma.len());
    }
    require_dense(level, sigma.len())?;
    let plan = decompose_staircase(&sigma);
    let c = synthesize_permutation(&sigma);
    write_circuit(a.common.out.as_deref(), &c)?;
    write_json(a.plan.as_deref(), &plan)?;
    let stats = CircuitStats::of(&c);
    let report = RouteReport {
        sigma_is_identity: sigma.is_identity(),
        staircase_layers: plan.layers.iter().filter(|l| !l.is_empty()).count(),
        staircases: plan.staircase_count(),
        depth_per_log2_sq: stats.primitive_depth as f64 / log2_sq(sigma.len()),
        stats,
        verification: Verification::new(level, check_routing(&c, &sigma, level)),
    };
    print_json(&report)?;
    Ok(report.verification.ok())
}

#[derive(Serialize)]
struct TransformReport {
    from: String,
    to: String,
    #[serde(flatten)]
    stats: CircuitStats,
    verification: Verification,
}

pub fn transform(a: TransformArgs) -> Result<bool> {
    let src = input::tree(&a.from, a.n)?;
    let dst = input::tree(&a.to, a.n.or(Some(src.num_qubits())))?;
    let level = a.common.verify;
    require_dense(level, src.num_qubits())?;
    let c = transform_between(&src, &dst)?;
    write_circuit(a.common.out.as_deref(), &c)?;
    let report = TransformReport {
        from: a.from,
        to: a.to,
        stats: CircuitStats::of(&c),
        verification: Verification::new(level, check_transform(&c, &src, &dst, level)),
    };
    print_json(&report)?;
    Ok(report.verification.ok())
}

#[derive(Serialize)]
struct VerifyReport {
    circuit: String,
    against: String,
    verification: Verification,
}

pub fn verify(a: VerifyArgs) -> Result<bool> {
    let c = input::circuit(&a.circuit)?;
    let n = c.num_qubits();
    let level = match a.verify {
        Level::None => bail!("verify needs --verify symbolic or statevector"),
        l => l,
    };
    require_dense(level, n)?;
    let (against, passed) = match (&a.sigma, &a.from, &a.to) {
        (Some(path), _, _) => {
            let sigma = input::permutation(path)?;
            if sigma.len() != n {
                bail!("permutation has {} modes, circuit {n} qubits", sigma.len());
            }
            (path.display().to_string(), check_routing(&c, &sigma, level))
        }
        (None, Some(from), Some(to)) => {
            let src = input::tree(from, Some(n))?;
            let dst = input::tree(to, Some(n))?;
            (format!("{from} -> {to}"), check_transform(&c, &src, &dst, level))
        }
        _ => bail!("give --sigma FILE or both --from and --to"),
    };
    let report = VerifyReport {
        circuit: a.circuit.display().to_string(),
        against,
        verification: Verification::new(level, passed),
    };
    print_json(&report)?;
    Ok(report.verification.ok())
}

pub fn depth_scan(a: DepthScanArgs) -> Result<bool> {
    let constructions = a
        .constructions
        .iter()
        .map(|s| s.parse::<Construction>().map_err(anyhow::Error::msg))
        .collect::<Result<Vec<_>>>()?;
    let sizes = a.n.map_or(a.sizes, |n| vec![n]);
    if sizes.iter().any(|&n| n == 0) {
        bail!("sizes must be positive");
    }
    let rows = metering::depth_scan(&sizes, &constructions, a.samples, a.seed);
    match &a.out {
        Some(p) => {
            let f = fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
            metering::write_csv(&rows, f)?;
        }
        None => match metering::write_csv(&rows, io::stdout().lock()) {
            Err(e) if !matches!(e.kind(), csv::ErrorKind::Io(io) if stdout_closed(io)) => {
                return Err(e.into())
            }
            _ => {}
        },
    }
    Ok(true)
}

#[derive(Serialize)]
struct TrotterLayerReport {
    sigma: Permutation,
    terms: Vec<usize>,
    routing_primitive_depth: usize,
}

#[derive(Serialize)]
struct TrotterReport {
    num_modes: usize,
    num_terms: usize,
    layers: Vec<TrotterLayerReport>,
    final_routing_primitive_depth: usize,
    adjacency_holds: bool,
    #[serde(flatten)]
    stats: CircuitStats,
    verification: Verification,
}

pub fn trotter(a: TrotterArgs) -> Result<bool> {
    let h = match (&a.hamiltonian, &a.grid, a.n) {
        (Some(path), _, _) => input::hamiltonian(path)?,
        (None, Some(shape), _) => {
            let (r, c) = input::grid(shape)?;
            Hamiltonian::grid(r, c, 1.0)
        }
        (None, None, Some(n)) => Hamiltonian::chain(n, 1.0),
        _ => bail!("give a Hamiltonian file, --grid or --n"),
    };
    let level = a.common.verify;
    require_dense(level, h.num_modes)?;
    let plan = plan_layers(&h)?;
    let c = emit_trotter_circuit(&plan, &h, a.dt);
    write_circuit(a.common.out.as_deref(), &c)?;
    write_json(a.plan.as_deref(), &plan.layers)?;
    let adjacency_holds = plan.adjacency_holds(&h);
    let passed = outcome(level, |l| {
        if !adjacency_holds {
            return Err(verify::VerifyError::Mismatch("adjacency invariant broken".into()));
        }
        plan.merged_routing.iter().try_for_each(|step| match l {
            Level::Statevector => verify::routing_statevector(&step.circuit, &step.permutation),
            _ => verify::routing_symbolic(&step.circuit, &step.permutation),
        })
    });
    let depth = |c: &Circuit| c.expand_macros().depth(true).expect("expanded");
    let report = TrotterReport {
        num_modes: h.num_modes,
        num_terms: h.terms.len(),
        layers: plan
            .layers
            .iter()
            .zip(&plan.merged_routing)
            .map(|(l, step)| TrotterLayerReport {
                sigma: l.sigma.clone(),
                terms: l.terms.clone(),
                routing_primitive_depth: depth(&step.circuit),
            })
            .collect(),
        final_routing_primitive_depth: plan.merged_routing.last().map_or(0, |s| depth(&s.circuit)),
        adjacency_holds,
        stats: CircuitStats::of(&c),
        verification: Verification::new(level, passed),
    };
    print_json(&report)?;
    Ok(report.verification.ok())
}

#[derive(Serialize)]
struct SkeletonStepReport {
    is_staircase: bool,
    staircases: Option<usize>,
    primitive_depth: usize,
}

#[derive(Serialize)]
struct SkeletonReport {
    steps: Vec<SkeletonStepReport>,
    #[serde(flatten)]
    stats: CircuitStats,
    depth_per_log2_sq: f64,
    verification: Verification,
}

pub fn fft_skeleton(a: FftArgs) -> Result<bool> {
    let level = a.common.verify;
    require_dense(level, a.n)?;
    let steps = fft_permutation_skeleton(a.n)?;
    let c = skeleton_circuit(&steps);
    write_circuit(a.common.out.as_deref(), &c)?;
    let total = steps
        .iter()
        .fold(Permutation::identity(a.n), |acc, s| acc.then(&s.permutation));
    let stats = CircuitStats::of(&c);
    let report = SkeletonReport {
        steps: steps
            .iter()
            .map(|s| SkeletonStepReport {
                is_staircase: s.is_staircase(),
                staircases: s.staircases.as_ref().map(Vec::len),
                primitive_depth: s.circuit().expand_macros().depth(true).expect("expanded"),
            })
            .collect(),
        depth_per_log2_sq: stats.primitive_depth as f64 / log2_sq(a.n),
        stats,
        verification: Verification::new(level, check_routing(&c, &total, level)),
    };
    print_json(&report)?;
    Ok(report.verification.ok())
}
