//! One PASS/FAIL line per acceptance criterion. With `ACCEPTANCE_STRICT` set,
//! any failure makes the process exit non-zero.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::path::Path;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use quper::circuit::unitary::dense::{embed_single, gate_matrix};
use quper::circuit::unitary::{max_abs_diff, pauli_x, C64};
use quper::circuit::{
    build_ansatz, circuit_stats, eval_permutation, ladder_gate_count, lower_to_linear_topology, synthesize_params,
    AnsatzKind, Circuit, Gate, SolverAnsatz,
};
use quper::dsm::{binary_dsm, birkhoff_decompose, extract_dsm, statevector_oracle, Dsm, DsmJob, DEFAULT_BIRKHOFF_TOL};
use quper::experiments::{run_census, CensusConfig, CensusMode};
use quper::group::{
    borel_subword, bruhat_decompose, bruhat_span_size, recognize_affine, word_to_matrix, AffineMap, Transvection,
};
use quper::optimizer::{
    adam_nesterov_step, fd_gradient, loss, quper_solve, random_baseline, AdamParams, AdamState, LossConfig,
    QuperConfig,
};
use quper::problems::{brute_force, gip_to_qap, load_qaplib, random_gip, random_qap, GipInstance, Problem};
use quper::projection::{project_hungarian, project_random_order};
use quper::{Gf2Matrix, Permutation};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn binary(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| if rng.gen() { PI } else { 0.0 }).collect()
}

fn continuous(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(0.0..2.0 * PI)).collect()
}

/// `prod_{i<q} (2^q - 2^i) * 2^q`, by plain integer arithmetic.
fn affine_group_order(q: u32) -> u128 {
    (0..q).map(|i| (1u128 << q) - (1u128 << i)).product::<u128>() << q
}

fn c1_span_and_census() -> Outcome {
    for q in 2..=5u32 {
        let expected = BigUint::from(affine_group_order(q));
        let got = bruhat_span_size(q as usize);
        ensure(got == expected, format!("span size q={q}: {got} != {expected}"))?;
    }
    ensure(bruhat_span_size(2) == BigUint::from(24u32), "q=2 span is not 24")?;
    ensure(bruhat_span_size(3) == BigUint::from(1344u32), "q=3 span is not 1344")?;
    ensure(bruhat_span_size(4) == BigUint::from(322560u32), "q=4 span is not 322560")?;
    let mut times = Vec::new();
    for (q, evaluations, count, limit) in [(2, 32u64, 24usize, 1u64), (3, 4096, 1344, 10)] {
        let c = build_ansatz(AnsatzKind::LX, q, None).unwrap();
        ensure(1u64 << c.param_count() == evaluations, format!("q={q}: {} parameters", c.param_count()))?;
        let start = Instant::now();
        let row = run_census(&CensusConfig::new(c, 0, CensusMode::Exhaustive)).map_err(|e| e.to_string())?;
        let took = start.elapsed();
        ensure(row.count_hungarian == count, format!("q={q}: census found {} permutations", row.count_hungarian))?;
        ensure(took < Duration::from_secs(limit), format!("q={q}: census took {took:?}"))?;
        times.push(format!("{took:.1?}"));
    }
    Ok(format!("spans 24/1344/322560/{}; census 24 and 1344 in {}", bruhat_span_size(5), times.join(" / ")))
}

fn c2_circuit_stats() -> Outcome {
    let mut bad = Vec::new();
    for q in 2..=7 {
        let s = circuit_stats(&build_ansatz(AnsatzKind::LX, q, None).unwrap());
        let (params, depth) = (q + 3 * q * (q - 1) / 2, 9 * q - 11);
        if s.param_count != params || s.depth != depth {
            bad.push(format!("q={q}: params {} depth {} (expected {params}, {depth})", s.param_count, s.depth));
        }
    }
    if bad.is_empty() {
        Ok("parameter counts and depths match for q = 2..7".into())
    } else {
        Err(bad.join("; "))
    }
}

fn c3_gate_identities() -> Outcome {
    let tol = 1e-12;
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    // Qubit 0 is the most significant bit of the basis index.
    let cx_oracle = DMatrix::from_fn(4, 4, |r, c| if r == [0, 1, 3, 2][c] { one } else { zero });
    let swap_oracle = DMatrix::from_fn(4, 4, |r, c| if r == [0, 2, 1, 3][c] { one } else { zero });
    let id = DMatrix::<C64>::identity(4, 4);
    let pcx = gate_matrix(&Gate::Pcx { control: 0, target: 1, slot: 0 }, &[PI], 2);
    let e = max_abs_diff(&pcx, &cx_oracle);
    ensure(e <= tol, format!("pcx(pi) - cx = {e:e}"))?;
    let e = max_abs_diff(&gate_matrix(&Gate::Pswap { a: 0, b: 1, slot: 0 }, &[PI], 2), &swap_oracle);
    ensure(e <= tol, format!("pswap(pi) - swap = {e:e}"))?;
    let e = max_abs_diff(&gate_matrix(&Gate::Pswap { a: 0, b: 1, slot: 0 }, &[0.0], 2), &id);
    ensure(e <= tol, format!("pswap(0) - I = {e:e}"))?;

    let cx = gate_matrix(&Gate::Cx { control: 0, target: 1 }, &[], 2);
    ensure(max_abs_diff(&cx, &cx_oracle) <= tol, "cx gate matrix")?;
    let (xc, xt) = (embed_single(&pauli_x(), 0, 2), embed_single(&pauli_x(), 1, 2));
    let xx = &xc * &xt;
    for (name, lhs, rhs) in [
        ("x on control", &cx * &xc, &xx * &cx),
        ("x on target", &cx * &xt, &xt * &cx),
        ("x on both", &cx * &xx, &xc * &cx),
    ] {
        let e = max_abs_diff(&lhs, &rhs);
        ensure(e <= tol, format!("cx relation with {name}: {e:e}"))?;
    }
    let cx3 = |c: usize, t: usize| gate_matrix(&Gate::Cx { control: c, target: t }, &[], 3);
    let mut worst = 0.0f64;
    for (k, l, m) in [(0, 1, 2), (0, 2, 1), (1, 0, 2), (1, 2, 0), (2, 0, 1), (2, 1, 0)] {
        let ab = cx3(k, l) * cx3(l, m);
        worst = worst.max(max_abs_diff(&(&ab * &ab), &cx3(k, m)));
        ensure(max_abs_diff(&ab, &(cx3(l, m) * cx3(k, l))) > 0.5, format!("cx_{k}{l} and cx_{l}{m} commute"))?;
    }
    ensure(worst <= tol, format!("(cx_kl cx_lm)^2 - cx_km = {worst:e}"))?;
    Ok(format!("all identities within {tol:e}"))
}

fn mod2_product(a: &[[u8; 4]; 4], b: &[[u8; 4]; 4]) -> [[u8; 4]; 4] {
    let mut out = [[0u8; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum::<u8>() % 2;
        }
    }
    out
}

fn c4_group_theorems() -> Outcome {
    let mut invertible = 0;
    for m in Gf2Matrix::enumerate_all(3) {
        if let Ok(f) = bruhat_decompose(&m) {
            invertible += 1;
            ensure(f.reassemble() == m, format!("reassembly failed for\n{m}"))?;
        }
    }
    ensure(invertible == 168, format!("{invertible} decomposable 3x3 matrices"))?;

    for q in [3usize, 4] {
        let above: Vec<(usize, usize)> = (0..q).flat_map(|r| (r + 1..q).map(move |c| (r, c))).collect();
        let mut seen = 0;
        for mask in 0u32..1 << above.len() {
            let mut a = Gf2Matrix::identity(q);
            for (bit, &(r, c)) in above.iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    a.set(r, c, true);
                }
            }
            let word = borel_subword(&a).map_err(|e| e.to_string())?;
            ensure(word_to_matrix(&word, q).unwrap() == a, format!("round trip failed for\n{a}"))?;
            seen += 1;
        }
        ensure(seen == 1 << (q * (q - 1) / 2), "wrong Borel count")?;
    }

    let t = |j: usize, k: usize| {
        let mut m = [[0u8; 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        m[j - 1][k - 1] = 1;
        m
    };
    let oracle = mod2_product(&mod2_product(&t(2, 4), &t(2, 3)), &t(1, 3));
    let printed: Gf2Matrix = "1010 0111 0010 0001".parse().unwrap();
    for (i, row) in oracle.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            ensure(printed.get(i, j) == (v == 1), "hand product differs from the printed matrix")?;
        }
    }
    let word: Vec<Transvection> =
        [(2, 4), (2, 3), (1, 3)].iter().map(|&(j, k)| Transvection::from_one_based(j, k).unwrap()).collect();
    ensure(word_to_matrix(&word, 4).unwrap() == printed, "library product differs from the printed matrix")?;
    Ok("168 GL_3 elements reassemble; 8 and 64 Borel matrices round-trip; worked example reproduced".into())
}

fn c5_dsm_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut worst_sum, mut worst_oracle) = (0.0f64, 0.0f64);
    let mut runs = 0;
    for kind in [AnsatzKind::LX, AnsatzKind::Bruhat, AnsatzKind::SEL] {
        for q in [2usize, 3] {
            for m in 0..=2 {
                let c = build_ansatz(kind, q + m, None).unwrap();
                for _ in 0..100 {
                    let job = DsmJob::new(c.clone(), m, continuous(&mut rng, c.param_count())).unwrap();
                    let d = extract_dsm(&job).map_err(|e| e.to_string())?;
                    let o = statevector_oracle(&job).map_err(|e| e.to_string())?;
                    worst_sum = worst_sum.max(d.stochastic_defect());
                    worst_oracle = worst_oracle.max(d.max_abs_diff(&o));
                    runs += 1;
                }
                if m == 0 {
                    for _ in 0..100 {
                        let theta = binary(&mut rng, c.param_count());
                        let d = extract_dsm(&DsmJob::new(c.clone(), 0, theta.clone()).unwrap()).unwrap();
                        let p = eval_permutation(&c, &theta).unwrap();
                        ensure(d == Dsm::from_permutation(&p), format!("{kind} q={q}: binary DSM is not the permutation"))?;
                    }
                }
            }
        }
    }
    ensure(worst_sum <= 1e-9, format!("row/column sum defect {worst_sum:e}"))?;
    ensure(worst_oracle <= 1e-10, format!("oracle disagreement {worst_oracle:e}"))?;
    Ok(format!("{runs} runs: sum defect {worst_sum:.1e}, oracle gap {worst_oracle:.1e}; binary m=0 DSMs exact"))
}

/// All `x -> a x + b` on `F_2^3`, by brute force over 3x3 matrices and shifts.
fn affine_set_q3() -> HashSet<Vec<usize>> {
    let mut set = HashSet::new();
    for code in 0u32..1 << 9 {
        let a = |r: usize, c: usize| code >> (3 * r + c) & 1;
        let apply = |x: usize, b: usize| -> usize {
            // bit r of the vector is qubit r, the (2 - r)-th binary digit of the index
            let bits: Vec<u32> = (0..3).map(|r| (x >> (2 - r) & 1) as u32).collect();
            let shift: Vec<u32> = (0..3).map(|r| (b >> (2 - r) & 1) as u32).collect();
            (0..3).fold(0, |acc, r| {
                let y = ((0..3).map(|c| a(r, c) * bits[c]).sum::<u32>() + shift[r]) % 2;
                acc | (y as usize) << (2 - r)
            })
        };
        for b in 0..8 {
            let map: Vec<usize> = (0..8).map(|x| apply(x, b)).collect();
            let distinct: HashSet<_> = map.iter().collect();
            if distinct.len() == 8 {
                set.insert(map);
            }
        }
    }
    set
}

fn c6_birkhoff_membership() -> Outcome {
    let span = affine_set_q3();
    ensure(span.len() == 1344, format!("oracle span has {} elements", span.len()))?;
    let c = build_ansatz(AnsatzKind::Bruhat, 4, None).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut max_terms, mut total_terms) = (0, 0);
    for _ in 0..500 {
        let theta = binary(&mut rng, c.param_count());
        let d = binary_dsm(&c, 1, &theta).map_err(|e| e.to_string())?;
        let dec = birkhoff_decompose(&d, DEFAULT_BIRKHOFF_TOL).map_err(|e| e.to_string())?;
        ensure(dec.terms.len() <= 1 << 9, format!("{} terms exceed 2^9", dec.terms.len()))?;
        for t in &dec.terms {
            ensure(span.contains(t.permutation.map()), format!("term {} is outside the span", t.permutation))?;
            ensure(recognize_affine(&t.permutation).unwrap().is_some(), "recognize_affine rejects a span element")?;
        }
        max_terms = max_terms.max(dec.terms.len());
        total_terms += dec.terms.len();
    }
    Ok(format!("500 DSMs, {total_terms} terms all in the 1344-element span, at most {max_terms} per DSM"))
}

fn c7_synthesis_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for q in [2, 3, 4] {
        for _ in 0..500 {
            let map = AffineMap::random(q, &mut rng);
            let (c, theta) = synthesize_params(&map).map_err(|e| e.to_string())?;
            ensure(theta.iter().all(|&t| t == 0.0 || t == PI), "non-binary synthesized angle")?;
            let p = eval_permutation(&c, &theta).map_err(|e| e.to_string())?;
            ensure(p == map.to_permutation(), format!("q={q}: synthesized permutation differs"))?;
            let x: Vec<usize> = (0..1usize << q).map(|i| {
                let bits = (0..q).fold(0u64, |acc, r| acc | (((i >> (q - 1 - r)) & 1) as u64) << r);
                let y = map.apply_bits(bits);
                (0..q).fold(0usize, |acc, r| acc | (((y >> r) & 1) as usize) << (q - 1 - r))
            }).collect();
            ensure(p.map() == x.as_slice(), format!("q={q}: permutation disagrees with a x + b"))?;
        }
        // the simulated unitary on a sample of the maps
        for _ in 0..10 {
            let map = AffineMap::random(q, &mut rng);
            let (c, theta) = synthesize_params(&map).unwrap();
            let d = extract_dsm(&DsmJob::new(c, 0, theta).unwrap()).unwrap();
            ensure(d.as_permutation() == Some(map.to_permutation()), "simulated DSM differs")?;
        }
    }
    Ok("1500 maps at q = 2, 3, 4 round-trip exactly".into())
}

fn c8_lowering() -> Outcome {
    let c = build_ansatz(AnsatzKind::Borel, 4, None).unwrap();
    let low = lower_to_linear_topology(&c);
    let adjacent = low.gates().iter().all(|g| {
        let qs = g.qubits();
        qs.len() < 2 || qs[0].abs_diff(qs[1]) == 1
    });
    ensure(adjacent, "lowered circuit has a long-range gate")?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..50 {
        let theta = binary(&mut rng, c.param_count());
        ensure(eval_permutation(&low, &theta).unwrap() == eval_permutation(&c, &theta).unwrap(), "permutations differ")?;
    }
    let mut expected_total = 0;
    for g in c.gates() {
        let qs = g.qubits();
        let p = qs[0].abs_diff(qs[1]);
        let single = Circuit::new(4, vec![Gate::Pcx { control: qs[0], target: qs[1], slot: 0 }]).unwrap();
        let n = lower_to_linear_topology(&single).gates().len();
        let want = if p > 1 { 4 * (p - 1) } else { 1 };
        ensure(n == want && ladder_gate_count(p) == want, format!("distance {p}: {n} gates, expected {want}"))?;
        expected_total += want;
    }
    ensure(low.gates().len() == expected_total, "total lowered size")?;
    Ok(format!("50 settings agree; {} gates after lowering", low.gates().len()))
}

fn brute_assignment(d: &Dsm) -> f64 {
    let n = d.n();
    let objective = |p: &Permutation| (0..n).map(|j| d.get(p.apply(j), j)).sum::<f64>();
    Permutation::all(n).map(|p| objective(&p)).fold(f64::NEG_INFINITY, f64::max)
}

fn c9_projections() -> Outcome {
    let c = build_ansatz(AnsatzKind::LX, 4, None).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..50 {
        let d = extract_dsm(&DsmJob::new(c.clone(), 1, continuous(&mut rng, c.param_count())).unwrap()).unwrap();
        let p = project_hungarian(&d);
        let got = (0..8).map(|j| d.get(p.apply(j), j)).sum::<f64>();
        let best = brute_assignment(&d);
        ensure(got == best, format!("DSM {i}: Hungarian {got} vs exhaustive {best}"))?;
    }
    for _ in 0..50 {
        let p = Permutation::random(8, &mut rng);
        let r = project_random_order(&Dsm::from_permutation(&p), rng.gen(), 50);
        ensure(r.candidates == vec![p.clone()], format!("random-order projection of {p} gave {:?}", r.candidates))?;
    }
    Ok("50 Hungarian optima exact; 50 permutation matrices recovered by every trial".into())
}

fn c10_solver() -> Outcome {
    let start = Instant::now();
    let mut slowest = Duration::ZERO;
    let mut timed = |f: &mut dyn FnMut() -> quper::Result<quper::optimizer::QuperResult>| {
        let t = Instant::now();
        let r = f();
        slowest = slowest.max(t.elapsed());
        r
    };
    let mut notes = Vec::new();

    let (mut optimal, mut beats4) = (0, 0);
    for s in 0..10u64 {
        let inst = random_qap(4, 1000 + s).unwrap();
        let opt = brute_force(&inst).1;
        let cfg = QuperConfig { ansatz: SolverAnsatz::Bruhat, m_max: 1, iterations: 200, seed: s, ..QuperConfig::default() };
        let r = timed(&mut || quper_solve(&inst, &cfg)).map_err(|e| e.to_string())?;
        ensure(r.trace.is_monotone(), "n=4 trace not monotone")?;
        ensure(r.value >= opt - 1e-9, "n=4 value below the optimum")?;
        optimal += usize::from((r.value - opt).abs() < 1e-9);
        beats4 += usize::from(r.value <= random_baseline(&inst, 200, s).1);
    }
    notes.push(format!("(a) {optimal}/10 optimal"));
    ensure(optimal >= 8, format!("(a) only {optimal}/10 runs reached the optimum"))?;

    let esc = load_qaplib(&Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/esc16f.dat")).map_err(|e| e.to_string())?;
    let r = timed(&mut || quper_solve(&esc, &QuperConfig { iterations: 20, ..QuperConfig::default() })).map_err(|e| e.to_string())?;
    ensure(r.value == 0.0, format!("(b) esc16f value {}", r.value))?;
    notes.push("(b) esc16f 0".into());

    let mut beats8 = 0;
    for s in 0..10u64 {
        let inst = random_qap(8, 2000 + s).unwrap();
        let cfg = QuperConfig { m_max: 1, iterations: 200, seed: s, ..QuperConfig::default() };
        let r = timed(&mut || quper_solve(&inst, &cfg)).map_err(|e| e.to_string())?;
        ensure(r.trace.is_monotone(), "n=8 trace not monotone")?;
        beats8 += usize::from(r.value <= random_baseline(&inst, 200, s).1);
    }
    notes.push(format!("(c) not worse than baseline {beats4}/10 at n=4, {beats8}/10 at n=8"));
    ensure(beats4 >= 8 && beats8 >= 8, format!("(c) baseline comparison {beats4}/10, {beats8}/10"))?;

    let mut zeros = 0;
    for s in 0..10u64 {
        let g = random_gip(8, 0.5, 3000 + s, true).unwrap();
        let cfg = QuperConfig { m_max: 0, iterations: 200, seed: s, lr: 0.4, ..QuperConfig::default() };
        let r = timed(&mut || quper_solve(&g, &cfg)).map_err(|e| e.to_string())?;
        ensure(r.trace.is_monotone(), "GIP trace not monotone")?;
        zeros += usize::from(r.value == 0.0);
    }
    notes.push(format!("(d) {zeros}/10 GIP runs at 0"));
    ensure(zeros >= 7, format!("(d) only {zeros}/10 GIP runs reached 0"))?;
    ensure(slowest < Duration::from_secs(120), format!("slowest run {slowest:?}"))?;
    Ok(format!("{}; slowest run {slowest:.1?}, total {:.1?}", notes.join(", "), start.elapsed()))
}

fn c11_gip_qap_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut worst = 0.0f64;
    for t in 0..100u64 {
        let n = [4, 5, 8][t as usize % 3];
        let a = random_gip(n, 0.5, 2 * t, false).unwrap().a;
        let b = random_gip(n, 0.5, 2 * t + 1, false).unwrap().a;
        let g = GipInstance::new(a.clone(), b.clone()).unwrap();
        let p = Permutation::random(n, &mut rng);
        let real = |m: &Vec<Vec<u8>>| DMatrix::from_fn(n, n, |i, j| m[i][j] as f64);
        let (am, bm) = (real(&a), real(&b));
        let pm = DMatrix::from_fn(n, n, |i, j| if p.apply(j) == i { 1.0 } else { 0.0 });
        let lhs = (&am - &pm * &bm * pm.transpose()).norm_squared() - (am.transpose() * &am).trace()
            - (bm.transpose() * &bm).trace();
        let rhs = 2.0 * (&am * &pm * (-&bm) * pm.transpose()).trace();
        worst = worst.max((lhs - rhs).abs());
        let lib = g.cost(&p) - (am.transpose() * &am).trace() - (bm.transpose() * &bm).trace();
        worst = worst.max((lib - 2.0 * gip_to_qap(&g).cost(&p)).abs());
        worst = worst.max((lib - lhs).abs());
    }
    ensure(worst <= 1e-9, format!("identity violated by {worst:e}"))?;
    Ok(format!("100 triples, worst deviation {worst:.1e}"))
}

fn c12_optimizer_numerics() -> Outcome {
    let inst = random_qap(4, 12).unwrap();
    let c = quper::circuit::solver_ansatz(SolverAnsatz::Bruhat, 3).unwrap();
    let cfg = LossConfig::default();
    let f = |x: &[f64]| -> quper::Result<f64> { Ok(loss(&DsmJob::new(c.clone(), 1, x.to_vec())?, &inst, &cfg)?.total) };
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let theta = continuous(&mut rng, c.param_count());
        let g1 = fd_gradient(f, &theta, 1e-5).map_err(|e| e.to_string())?;
        let g2 = fd_gradient(f, &theta, 5e-6).map_err(|e| e.to_string())?;
        let scale = g2.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        let dev = g1.iter().zip(&g2).fold(0.0f64, |m, (a, b)| m.max((a - b).abs())) / scale;
        worst = worst.max(dev);
    }
    ensure(worst <= 1e-4, format!("step-halving deviation {worst:e}"))?;
    let s = adam_nesterov_step(&AdamState::new(vec![0.0], AdamParams::default()), &[1.0]).unwrap();
    // mu = 0.1, nu = 0.001; mu_bar = 0.9 / 0.19 * 0.1 + 0.1 / 0.1 = 28 / 19; nu_bar = 1
    let golden = -0.007_368_420_978_947_371;
    ensure((s.theta[0] - golden).abs() <= 1e-15, format!("first Adam step {} vs {golden}", s.theta[0]))?;
    Ok(format!("gradient step-halving within {worst:.1e}; first Adam step {:.12}", s.theta[0]))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("1 span formula and census", c1_span_and_census),
        ("2 circuit statistics", c2_circuit_stats),
        ("3 gate identities", c3_gate_identities),
        ("4 group theorems", c4_group_theorems),
        ("5 DSM properties", c5_dsm_properties),
        ("6 Birkhoff membership", c6_birkhoff_membership),
        ("7 affine synthesis", c7_synthesis_round_trip),
        ("8 topology lowering", c8_lowering),
        ("9 projections", c9_projections),
        ("10 solver behaviour", c10_solver),
        ("11 GIP/QAP identity", c11_gip_qap_identity),
        ("12 optimizer numerics", c12_optimizer_numerics),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        match std::panic::catch_unwind(run) {
            Ok(Ok(detail)) => println!("PASS {name}: {detail}"),
            Ok(Err(why)) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
            Err(_) => {
                failed += 1;
                println!("FAIL {name}: panicked");
            }
        }
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed > 0 && std::env::var_os("ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
