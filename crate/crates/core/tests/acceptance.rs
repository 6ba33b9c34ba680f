//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Run with `cargo test -p fermroute-core --test acceptance`.

use std::fmt::Display;
use std::fs::File;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use fermroute::circuit::{Circuit, Gate};
use fermroute::metering::{self, linear_fit, staircase_families, Construction};
use fermroute::oracle;
use fermroute::pauli::Phase;
use fermroute::random::{applicable_tree_gate, random_binary_tree, random_staircase, scrambled_tree};
use fermroute::routing::{ceil_log2, fswap_naive, staircase_circuit};
use fermroute::transform::balance_binary_instrumented;
use fermroute::trotter::{fft_permutation_skeleton, plan_layers, skeleton_circuit};
use fermroute::verify::{self, DENSE_TOL};
use fermroute::{
    decompose_staircase, synthesize_permutation, transform_between, Hamiltonian, Permutation,
    StandardKind, TernaryTree,
};

/// Pinned envelope for a single staircase: depth <= slope * ceil(log2 N).
const STAIRCASE_SLOPE: f64 = 13.0;
/// Allowed growth of depth / ceil(log2 N) between consecutive sizes from 2^8 on.
const RATIO_GROWTH: f64 = 1.10;
/// Full permutations: depth <= c * ceil(log2 N)^2.
const PERMUTATION_C: f64 = 4.0;
/// FFT skeleton: depth <= c * log2(N)^2.
const SKELETON_C: f64 = 8.0;
/// Layers needed for nearest-neighbour hopping on a grid.
const GRID_MAX_LAYERS: usize = 4;

const ROUTING_EXHAUSTIVE_BUDGET: Duration = Duration::from_secs(120);
const ROUTING_RANDOM_BUDGET: Duration = Duration::from_secs(300);
const PLAN_BUDGET: Duration = Duration::from_secs(60);

type Outcome = Result<String, String>;

fn err<E: Display>(e: E) -> String {
    e.to_string()
}

fn within(start: Instant, budget: Duration) -> Result<(), String> {
    let t = start.elapsed();
    if t > budget {
        return Err(format!("took {t:.1?}, budget {budget:?}"));
    }
    Ok(())
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..used.len() {
            if !used[k] {
                used[k] = true;
                prefix.push(k);
                rec(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn routing_exhaustive() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    let mut worst = 0.0f64;
    for n in 2..=5 {
        for p in all_permutations(n) {
            let sigma = Permutation::new(p).map_err(err)?;
            let u = oracle::circuit_unitary(&synthesize_permutation(&sigma)).map_err(err)?;
            let want = oracle::permutation_unitary(&sigma).map_err(err)?;
            let d = oracle::max_abs_diff(&u, &want);
            worst = worst.max(d);
            if d >= DENSE_TOL {
                return Err(format!("sigma {:?}: max |diff| {d:e}", sigma.as_slice()));
            }
            cases += 1;
        }
    }
    if cases != 2 + 6 + 24 + 120 {
        return Err(format!("{cases} cases"));
    }
    within(start, ROUTING_EXHAUSTIVE_BUDGET)?;
    Ok(format!("{cases} permutations, max |diff| {worst:.1e} < {DENSE_TOL:e}"))
}

fn routing_random() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    for n in [64, 128, 256] {
        for _ in 0..200 {
            let sigma = Permutation::random(n, &mut rng);
            verify::routing_symbolic(&synthesize_permutation(&sigma), &sigma)
                .map_err(|e| format!("N={n}: {e}"))?;
        }
    }
    within(start, ROUTING_RANDOM_BUDGET)?;
    Ok("600 permutations at N=64,128,256 symbolically exact".into())
}

fn staircase_depth() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0003);
    let mut points = Vec::new();
    let mut report = Vec::new();
    for e in 4..=14usize {
        let n = 1 << e;
        let mut worst = (0, "");
        for (name, s) in staircase_families(n) {
            let d = staircase_circuit(&s, n).map_err(err)?.expand_macros().depth(true).map_err(err)?;
            worst = worst.max((d, name));
        }
        // random staircases must stay under the same envelope
        for _ in 0..8 {
            let s = random_staircase(n, &mut rng);
            let d = staircase_circuit(&s, n).map_err(err)?.expand_macros().depth(true).map_err(err)?;
            if d as f64 > STAIRCASE_SLOPE * e as f64 {
                return Err(format!("random staircase at N={n} has depth {d}"));
            }
        }
        if worst.0 as f64 > STAIRCASE_SLOPE * e as f64 {
            return Err(format!("{} at N={n} has depth {}", worst.1, worst.0));
        }
        points.push((e as f64, worst.0 as f64));
        report.push(format!("{n}:{}", worst.0));
    }
    for w in points.windows(2).filter(|w| w[0].0 >= 8.0) {
        let (r0, r1) = (w[0].1 / w[0].0, w[1].1 / w[1].0);
        if r1 > RATIO_GROWTH * r0 {
            return Err(format!("depth/log2N grows {r0:.3} -> {r1:.3} at 2^{}", w[1].0));
        }
    }
    let (a, b) = linear_fit(&points);
    Ok(format!(
        "fit depth = {a:.2} log2N {b:+.2}; envelope {STAIRCASE_SLOPE} log2N; worst {}",
        report.join(" ")
    ))
}

fn permutation_depth() -> Outcome {
    let sizes: Vec<usize> = (4..=12).map(|e| 1 << e).collect();
    let rows = metering::depth_scan(&sizes, &[Construction::Permutation], 20, 0x5eed_0004);
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("permutation_depth.csv");
    metering::write_csv(&rows, File::create(&path).map_err(err)?).map_err(err)?;
    let (mut num, mut den) = (0.0, 0.0);
    for &n in &sizes {
        let worst = rows.iter().filter(|r| r.n == n).map(|r| r.primitive_depth).max();
        let worst = worst.ok_or(format!("no rows for N={n}"))? as f64;
        let l2 = (ceil_log2(n) as f64).powi(2);
        if worst > PERMUTATION_C * l2 {
            return Err(format!("N={n}: depth {worst} > {PERMUTATION_C} log2^2 N"));
        }
        num += worst * l2;
        den += l2 * l2;
    }
    Ok(format!(
        "fit c = {:.3} (pinned {PERMUTATION_C}); {} rows in {}",
        num / den,
        rows.len(),
        path.display()
    ))
}

fn plan_properties() -> Outcome {
    let start = Instant::now();
    for n in [1_000usize, 100_000] {
        (0..1_000u64).into_par_iter().try_for_each(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0005 ^ (i << 20) ^ n as u64);
            let sigma = Permutation::random(n, &mut rng);
            let plan = decompose_staircase(&sigma);
            plan.check_structure().map_err(|e| format!("N={n}: {e}"))?;
            if plan.compose() != sigma {
                return Err(format!("N={n}: plan does not compose to sigma"));
            }
            Ok(())
        })?;
    }
    within(start, PLAN_BUDGET)?;
    Ok(format!("2000 plans in {:.1?}", start.elapsed()))
}

fn fswap_identity() -> Outcome {
    let mut pairs = 0;
    for n in 2..=4 {
        for i in 0..n {
            for j in i + 1..n {
                let u = oracle::circuit_unitary(&fswap_naive(i, j, n).map_err(err)?).map_err(err)?;
                let want = oracle::fswap_matrix(i, j, n).map_err(err)?;
                let d = oracle::max_abs_diff(&u, &want);
                if d >= DENSE_TOL {
                    return Err(format!("fswap({i},{j}) at N={n}: {d:e}"));
                }
                pairs += 1;
            }
        }
    }
    let u = oracle::circuit_unitary(&fswap_naive(0, 1, 2).map_err(err)?).map_err(err)?;
    if (u[(3, 3)].re + 1.0).abs() >= DENSE_TOL || u[(3, 3)].im.abs() >= DENSE_TOL {
        return Err(format!("<11|fswap|11> = {}", u[(3, 3)]));
    }
    Ok(format!("{pairs} (i,j) pairs; <11|fswap|11> = -1"))
}

fn tree_gate_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0007);
    let mut rotations = 0;
    for case in 0..500 {
        let steps = rng.random_range(0..40);
        let tree = scrambled_tree(6, steps, &mut rng);
        let gate = applicable_tree_gate(&tree, &mut rng);
        let after = tree.apply_gate(&gate).map_err(err)?;
        for (g, (old, new)) in tree.majorana_strings().iter().zip(after.majorana_strings()).enumerate() {
            let conj = old.conjugate(&gate).map_err(err)?;
            if !conj.same_letters(&new) {
                return Err(format!("case {case}, {gate}: Majorana {g} {conj} vs {new}"));
            }
        }
        if let Gate::Cnot(..) = gate {
            rotations += 1;
            if tree.inorder_qubits(tree.root()) != after.inorder_qubits(after.root()) {
                return Err(format!("case {case}: {gate} changed the inorder sequence"));
            }
        }
    }
    Ok(format!("500 cases, {rotations} rotations keep inorder"))
}

fn prefix_xor(bits: &[bool]) -> Vec<bool> {
    bits.iter()
        .scan(false, |acc, &b| {
            *acc ^= b;
            Some(*acc)
        })
        .collect()
}

fn bits_of(index: usize, n: usize) -> Vec<bool> {
    (0..n).map(|q| index >> (n - 1 - q) & 1 == 1).collect()
}

fn index_of(bits: &[bool]) -> usize {
    bits.iter().fold(0, |acc, &b| acc << 1 | b as usize)
}

fn standard_transforms() -> Outcome {
    let std_tree = |kind, n| TernaryTree::standard(kind, n).map_err(err);
    let bk = std_tree(StandardKind::BravyiKitaev, 7)?;
    let jw7 = std_tree(StandardKind::JordanWigner, 7)?;
    let c = transform_between(&bk, &jw7).map_err(err)?;
    let cnot_layers = c.layers_containing(|g| matches!(g, Gate::Cnot(..)));
    if cnot_layers != 2 || c.count(|g| !matches!(g, Gate::Cnot(..))) != 0 {
        return Err(format!("BK->JW at N=7: {cnot_layers} CNOT layers, {} gates", c.len()));
    }
    verify::transform_statevector(&c, &bk, &jw7).map_err(err)?;
    for n in 1..=6 {
        let jw = std_tree(StandardKind::JordanWigner, n)?;
        let parity = std_tree(StandardKind::Parity, n)?;
        let c = transform_between(&jw, &parity).map_err(err)?;
        let u = oracle::circuit_unitary(&c).map_err(err)?;
        let dim = 1 << n;
        for b in 0..dim {
            let bits = bits_of(b, n);
            let want = prefix_xor(&bits);
            let mut got = bits.clone();
            let phase = c.apply_to_basis(&mut got).map_err(err)?;
            if got != want || phase != Phase::ONE {
                return Err(format!("JW->Parity N={n}: basis {b} maps wrong"));
            }
            let col = index_of(&want);
            for r in 0..dim {
                let expected = if r == col { 1.0 } else { 0.0 };
                if (u[(r, b)].re - expected).abs() >= DENSE_TOL || u[(r, b)].im.abs() >= DENSE_TOL {
                    return Err(format!("JW->Parity N={n}: unitary entry ({r},{b})"));
                }
            }
        }
    }
    Ok("BK->JW at N=7 in 2 CNOT layers and exact; JW->Parity is prefix XOR for N<=6".into())
}

fn balancing_contraction() -> Outcome {
    let n = 511;
    let bound = 5.0 * ((n as f64).log2() + 5.0);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
    let (mut checks, mut worst_height, mut max_rounds) = (0, 0, 0);
    for case in 0..100 {
        let tree = random_binary_tree(n, &mut rng);
        let (_, balanced, report) = balance_binary_instrumented(&tree).map_err(err)?;
        if report.violations() > 0 {
            return Err(format!("tree {case}: {} halving-depth violations", report.violations()));
        }
        checks += report.rounds.iter().map(|r| r.checks).sum::<usize>();
        max_rounds = max_rounds.max(report.rounds.len());
        worst_height = worst_height.max(balanced.height());
        if balanced.height() as f64 > bound {
            return Err(format!("tree {case}: final depth {}", balanced.height()));
        }
    }
    if checks == 0 {
        return Err("no subtrees were instrumented".into());
    }
    Ok(format!(
        "{checks} subtree checks, 0 violations; final depth <= {worst_height} (bound {bound:.1}); <= {max_rounds} rounds"
    ))
}

fn end_to_end_transforms() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_000a);
    let allowed = |g: &Gate| {
        matches!(
            g,
            Gate::Cnot(..) | Gate::S(_) | Gate::Sdg(_) | Gate::Swap(..) | Gate::X(_) | Gate::Z(_)
        )
    };
    for n in 4..=6 {
        let jw = TernaryTree::standard(StandardKind::JordanWigner, n).map_err(err)?;
        let identity = oracle::circuit_unitary(&Circuit::new(n)).map_err(err)?;
        for case in 0..100 {
            let tree = scrambled_tree(n, 10 * n, &mut rng);
            let fail = |what: &str, e: String| format!("N={n} case {case}: {what}: {e}");
            let there = transform_between(&tree, &jw).map_err(|e| fail("forward", err(e)))?;
            let back = transform_between(&jw, &tree).map_err(|e| fail("backward", err(e)))?;
            if let Some(g) = there.gates().iter().chain(back.gates()).find(|g| !allowed(g)) {
                return Err(fail("gate set", g.to_string()));
            }
            verify::transform_symbolic(&there, &tree, &jw).map_err(|e| fail("symbolic", err(e)))?;
            verify::transform_statevector(&there, &tree, &jw).map_err(|e| fail("dense", err(e)))?;
            let round = Circuit::compose(&there, &back).map_err(err)?;
            let d = oracle::max_abs_diff(&oracle::circuit_unitary(&round).map_err(err)?, &identity);
            if d >= DENSE_TOL {
                return Err(fail("round trip", format!("{d:e}")));
            }
        }
    }
    Ok("300 scrambled trees at N=4,5,6 exact both ways".into())
}

fn fft_skeleton() -> Outcome {
    let mut report = Vec::new();
    for n in [8usize, 64, 1024] {
        let steps = fft_permutation_skeleton(n).map_err(err)?;
        let (last, levels) = steps.split_last().ok_or_else(|| "empty skeleton".to_string())?;
        if levels.iter().any(|s| !s.is_staircase()) {
            return Err(format!("N={n}: a butterfly level is not a staircase layer"));
        }
        let composed = steps
            .iter()
            .fold(Permutation::identity(n), |acc, s| acc.then(&s.permutation));
        let m = n.trailing_zeros();
        if (0..n).any(|k| composed.apply(k) != k.reverse_bits() >> (usize::BITS - m)) {
            return Err(format!("N={n}: skeleton does not end in bit-reversed order"));
        }
        let depth = skeleton_circuit(&steps).expand_macros().depth(true).map_err(err)?;
        let l2 = (m as f64).powi(2);
        if depth as f64 > SKELETON_C * l2 {
            return Err(format!("N={n}: depth {depth} > {SKELETON_C} log2^2 N"));
        }
        report.push(format!(
            "N={n}: {} staircase levels, final {}, depth {depth} ({:.2} log2^2 N)",
            levels.len(),
            if last.is_staircase() { "staircase" } else { "general" },
            depth as f64 / l2
        ));
    }
    Ok(report.join("; "))
}

fn fanout_cancellation() -> Outcome {
    for k in 2..=5 {
        let gates = (0..k)
            .map(|c| Gate::CzFanout {
                control: c,
                targets: (0..k).filter(|&t| t != c).collect(),
            })
            .collect();
        let c = Circuit::from_gates(k, gates).map_err(err)?;
        let expanded = c.expand_macros();
        for b in 0..1 << k {
            let mut bits = bits_of(b, k);
            let phase = expanded.apply_to_basis(&mut bits).map_err(err)?;
            if index_of(&bits) != b || phase != Phase::ONE {
                return Err(format!("k={k}: basis {b} picks up phase i^{}", phase.power()));
            }
        }
        let u = oracle::circuit_unitary(&expanded).map_err(err)?;
        let d = oracle::max_abs_diff(&u, &oracle::circuit_unitary(&Circuit::new(k)).map_err(err)?);
        if d != 0.0 {
            return Err(format!("k={k}: max |U - I| = {d:e}"));
        }
    }
    Ok("k=2..5 fanouts compose to the identity exactly".into())
}

fn trotter_grid() -> Outcome {
    let sides = [1usize, 2, 3, 4, 5, 7, 8, 13, 16, 31, 32];
    let mut most = 0;
    let mut grids = 0;
    for &r in &sides {
        for &c in &sides {
            if r * c < 2 {
                continue;
            }
            let h = Hamiltonian::grid(r, c, 1.0);
            let plan = plan_layers(&h).map_err(err)?;
            if plan.layers.len() > GRID_MAX_LAYERS {
                return Err(format!("{r}x{c}: {} layers", plan.layers.len()));
            }
            if !plan.adjacency_holds(&h) {
                return Err(format!("{r}x{c}: a layer has non-adjacent term modes"));
            }
            most = most.max(plan.layers.len());
            grids += 1;
        }
    }
    Ok(format!("{grids} grids up to 32x32, at most {most} layers"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 13] = [
        ("routing-exhaustive", routing_exhaustive),
        ("routing-random-symbolic", routing_random),
        ("staircase-depth-log", staircase_depth),
        ("permutation-depth-log2", permutation_depth),
        ("staircase-plan-structure", plan_properties),
        ("fswap-matrix", fswap_identity),
        ("tree-gate-calculus", tree_gate_consistency),
        ("standard-encoding-transforms", standard_transforms),
        ("balancing-contraction", balancing_contraction),
        ("general-tree-transforms", end_to_end_transforms),
        ("fft-skeleton", fft_skeleton),
        ("fanout-cancellation", fanout_cancellation),
        ("trotter-grid-layers", trotter_grid),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run)
            .unwrap_or_else(|_| Err("panicked".into()));
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("PASS {name} [{t:.1?}] {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name} [{t:.1?}] {detail}");
            }
        }
    }
    println!("{} of 13 criteria passed", 13 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
