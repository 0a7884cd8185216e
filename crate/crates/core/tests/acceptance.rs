//! Acceptance criteria 1-8. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any fails.

use std::f64::consts::{FRAC_PI_4, TAU};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use qtcss_core::classical::{
    attack_with_old_shares, deal, deal_from_polynomial, reconstruct_from_columns,
    reconstruct_from_rows, reconstruct_truncated, reference_polynomial, AttackMethod,
    ClassicalShare,
};
use qtcss_core::field::{solve_linear, PrimeField};
use qtcss_core::protocol::{
    deal_quantum, decode_leaked_bit, encode_bit, hiding_report, ClassicalBitEncoding,
    ProtocolError, ShareHandle,
};
use qtcss_core::quantum::{partial_trace, GhzForm, MeasurementBasis, SecretQubit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

/// Every nonempty proper subset of `0..n`.
fn proper_subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (1u32..(1 << n) - 1).map(move |mask| (0..n).filter(|&i| mask >> i & 1 == 1).collect())
}

fn random_secret(rng: &mut ChaCha20Rng) -> SecretQubit {
    loop {
        let a = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let b = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        if a.norm() > 1e-3 && b.norm() > 1e-3 {
            return SecretQubit::new(a / norm, b / norm).expect("normalized");
        }
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let f = PrimeField::new(11).map_err(err)?;
    let shares = deal_from_polynomial(&reference_polynomial(), 5).map_err(err)?;

    let rows = reconstruct_from_rows(&shares[0..2]).map_err(err)?;
    let truncated: Vec<_> = shares[0..3].iter().map(ClassicalShare::truncate).collect();
    let points = vec![
        f.elements(&[1, 2]),
        f.elements(&[3, 4]),
        f.elements(&[5, 6]),
    ];
    let middle = reconstruct_truncated(&truncated, &points).map_err(err)?;
    let columns = reconstruct_from_columns(&shares[0..4]).map_err(err)?;
    let elapsed = start.elapsed();

    let got = [rows.value(), middle.value(), columns.value()];
    ensure(got == [7, 7, 7], || {
        format!("thresholds 2/3/4 gave {got:?}")
    })?;
    ensure(elapsed < Duration::from_secs(1), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("thresholds 2, 3, 4 each return 7 in {elapsed:?}"))
}

fn criterion_2() -> Outcome {
    let f = PrimeField::new(11).map_err(err)?;
    // (1, x, y, xy, y², xy²) at (1,1),(1,2),(2,3),(2,4),(3,5),(3,6), mod 11
    let matrix: Vec<_> = [
        [1, 1, 1, 1, 1, 1],
        [1, 1, 2, 2, 4, 4],
        [1, 2, 3, 6, 9, 7],
        [1, 2, 4, 8, 5, 10],
        [1, 3, 5, 4, 3, 9],
        [1, 3, 6, 7, 3, 9],
    ]
    .iter()
    .map(|r| f.elements(r))
    .collect();
    let solved = solve_linear(&matrix, &f.elements(&[0, 7, 9, 9, 1, 1])).map_err(err)?;
    let values: Vec<u32> = solved.iter().map(|v| v.value()).collect();
    ensure(values == [7, 2, 2, 3, 3, 5], || {
        format!("solution {values:?}")
    })?;

    let truncated = reference_polynomial().truncate_y(2).coefficients_y_major();
    ensure(truncated == solved, || {
        "solution differs from the truncated polynomial".into()
    })?;
    Ok(format!("(0,7,9,9,1,1) solves to {values:?}"))
}

fn criterion_3() -> Outcome {
    let f = PrimeField::new(11).map_err(err)?;
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let mut successes = 0;
    for _ in 0..100 {
        let secret = f.random(&mut rng);
        let (_, shares) = deal(secret, 5, 1, 3, &mut rng).map_err(err)?;
        let i = rng.random_range(0..5);
        let j = (i + rng.random_range(1..5)) % 5;
        let pair = [shares[i].clone(), shares[j].clone()];
        let ok = [AttackMethod::ColumnPolyAtZero, AttackMethod::ReTruncation]
            .iter()
            .all(|&m| {
                attack_with_old_shares(&pair, 3, m).map(|t| t.recovered_secret) == Ok(secret)
            });
        successes += usize::from(ok);
    }
    ensure(successes == 100, || format!("{successes}/100 recovered"))?;
    Ok("100/100 secrets recovered from two old shares at declared threshold 3".into())
}

struct Sweep {
    worst_purity: f64,
    worst_fidelity: f64,
    worst_spread: f64,
    max_purity: f64,
    subsets: usize,
}

/// Every proper subset for n in 2..=10 and 50 random secrets.
fn subset_sweep() -> Result<Sweep, String> {
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let mut sweep = Sweep {
        worst_purity: 0.0,
        worst_fidelity: 0.0,
        worst_spread: 0.0,
        max_purity: 0.0,
        subsets: 0,
    };
    for n in 2..=10 {
        for _ in 0..50 {
            let secret = random_secret(&mut rng);
            let expected = secret.leakage_fidelity();
            let (session, handles) = deal_quantum(secret, n).map_err(err)?;
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for subset in proper_subsets(n) {
                let picked: Vec<&ShareHandle> = subset.iter().map(|&i| &handles[i]).collect();
                let report = session.analyze_subset(&picked).map_err(err)?;
                sweep.worst_purity = sweep.worst_purity.max((report.purity - expected).abs());
                sweep.worst_fidelity = sweep.worst_fidelity.max((report.fidelity - expected).abs());
                sweep.max_purity = sweep.max_purity.max(report.purity);
                lo = lo.min(report.fidelity);
                hi = hi.max(report.fidelity);
                sweep.subsets += 1;
            }
            sweep.worst_spread = sweep.worst_spread.max(hi - lo);
        }
    }
    Ok(sweep)
}

fn dense_agreement() -> Result<f64, String> {
    let mut rng = ChaCha20Rng::seed_from_u64(44);
    let mut worst = 0.0f64;
    for n in 1..=12 {
        for _ in 0..5 {
            let secret = random_secret(&mut rng);
            let (session, _) = deal_quantum(secret, n).map_err(err)?;
            let compact = session.state().expand().map_err(err)?;
            worst = worst.max(
                session
                    .replay_dense()
                    .map_err(err)?
                    .max_abs_diff(&compact)
                    .map_err(err)?,
            );
        }
        // the same size reached through splits
        let secret = random_secret(&mut rng);
        let (mut session, mut live) = deal_quantum(secret, 1).map_err(err)?;
        while session.threshold() < n {
            let arity = rng.random_range(2..=(n - session.threshold() + 1).min(4));
            let victim = live.remove(rng.random_range(0..live.len()));
            live.extend(session.split(&victim, arity).map_err(err)?);
        }
        let compact = session.state().expand().map_err(err)?;
        worst = worst.max(
            session
                .replay_dense()
                .map_err(err)?
                .max_abs_diff(&compact)
                .map_err(err)?,
        );
    }
    Ok(worst)
}

fn criterion_4(sweep: &Sweep) -> Outcome {
    ensure(sweep.worst_purity <= 1e-10, || {
        format!("purity deviates by {:e}", sweep.worst_purity)
    })?;
    ensure(sweep.max_purity < 1.0 - 1e-10, || {
        format!("a subset has purity {}", sweep.max_purity)
    })?;
    let agreement = dense_agreement()?;
    ensure(agreement <= 1e-12, || {
        format!("compact and dense differ by {agreement:e}")
    })?;
    Ok(format!(
        "{} subsets: purity error {:.1e}, max purity {:.6}; compact/dense gap {:.1e}",
        sweep.subsets, sweep.worst_purity, sweep.max_purity, agreement
    ))
}

fn criterion_5(sweep: &Sweep) -> Outcome {
    ensure(sweep.worst_fidelity <= 1e-10, || {
        format!("fidelity deviates by {:e}", sweep.worst_fidelity)
    })?;
    ensure(sweep.worst_spread <= 1e-10, || {
        format!("fidelity varies across subsets by {:e}", sweep.worst_spread)
    })?;

    // F(x) = x² + (1 - x)² measured on a protocol run with |a|² = x
    let mut best = (f64::INFINITY, f64::NAN);
    let mut worst_curve = 0.0f64;
    for step in 0..=1000 {
        let x = step as f64 * 1e-3;
        let secret = SecretQubit::new(
            Complex64::new(x.sqrt(), 0.0),
            Complex64::new((1.0 - x).sqrt(), 0.0),
        )
        .map_err(err)?;
        let (session, handles) = deal_quantum(secret, 3).map_err(err)?;
        let fidelity = session
            .analyze_subset(&[&handles[0]])
            .map_err(err)?
            .fidelity;
        worst_curve = worst_curve.max((fidelity - (x * x + (1.0 - x) * (1.0 - x))).abs());
        if fidelity < best.0 {
            best = (fidelity, x);
        }
    }
    let (value, at) = best;
    ensure(worst_curve <= 1e-10, || {
        format!("curve deviates by {worst_curve:e}")
    })?;
    ensure((at - 0.5).abs() <= 1e-3, || format!("minimum at x = {at}"))?;
    ensure((value - 0.5).abs() <= 1e-6, || {
        format!("minimum value {value}")
    })?;
    Ok(format!(
        "fidelity error {:.1e}, spread {:.1e}; grid minimum {value:.6} at x = {at:.3}",
        sweep.worst_fidelity, sweep.worst_spread
    ))
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let omegas: Vec<f64> = (0..20).map(|_| rng.random_range(0.0..TAU)).collect();
    let mut worst = 0.0f64;
    for &omega in &omegas {
        let enc = ClassicalBitEncoding::equator(omega);
        for n in [3, 5, 9] {
            let (zero, h0) = deal_quantum(encode_bit(false, &enc), n).map_err(err)?;
            let (one, h1) = deal_quantum(encode_bit(true, &enc), n).map_err(err)?;
            for subset in proper_subsets(n) {
                let p0: Vec<&ShareHandle> = subset.iter().map(|&i| &h0[i]).collect();
                let p1: Vec<&ShareHandle> = subset.iter().map(|&i| &h1[i]).collect();
                let rho0 = zero.analyze_subset(&p0).map_err(err)?.reduced_state;
                let rho1 = one.analyze_subset(&p1).map_err(err)?.reduced_state;
                worst = worst.max(hiding_report(&rho0, &rho1).map_err(err)?);
            }
        }
    }
    ensure(worst < 1e-12, || format!("hiding_report reached {worst:e}"))?;

    let trials = 10_000;
    let sigma = (0.25 / trials as f64).sqrt();
    let mut frequencies = Vec::new();
    for n in [3, 5, 9] {
        let mut correct = 0;
        for t in 0..trials {
            let enc = ClassicalBitEncoding::equator(omegas[t % omegas.len()]);
            let bit: bool = rng.random();
            let (session, handles) = deal_quantum(encode_bit(bit, &enc), n).map_err(err)?;
            let leaked = session
                .analyze_subset(&[&handles[n - 1]])
                .map_err(err)?
                .reduced_state;
            correct += usize::from(decode_leaked_bit(&leaked, &enc, &mut rng).map_err(err)? == bit);
        }
        let freq = correct as f64 / trials as f64;
        ensure((freq - 0.5).abs() <= 3.0 * sigma, || {
            format!("n = {n}: recovery frequency {freq}")
        })?;
        frequencies.push(freq);
    }

    let tilted =
        ClassicalBitEncoding::from_basis(MeasurementBasis::new(FRAC_PI_4, omegas[0]).map_err(err)?);
    let (zero, h0) = deal_quantum(encode_bit(false, &tilted), 3).map_err(err)?;
    let (one, h1) = deal_quantum(encode_bit(true, &tilted), 3).map_err(err)?;
    let leak = hiding_report(
        &zero.analyze_subset(&[&h0[0]]).map_err(err)?.reduced_state,
        &one.analyze_subset(&[&h1[0]]).map_err(err)?.reduced_state,
    )
    .map_err(err)?;
    ensure(leak > 0.01, || format!("θ = π/4 difference only {leak}"))?;
    Ok(format!(
        "max equator difference {worst:.1e}; recovery frequencies {frequencies:?} (3σ = {:.3}); θ = π/4 difference {leak:.6}",
        3.0 * sigma
    ))
}

fn criterion_7() -> Outcome {
    let secret =
        SecretQubit::new(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)).map_err(err)?;
    let (mut session, originals) = deal_quantum(secret, 3).map_err(err)?;
    let mut nine = Vec::new();
    for h in &originals {
        nine.extend(session.split(h, 3).map_err(err)?);
    }
    ensure(session.threshold() == 9, || {
        format!("threshold {}", session.threshold())
    })?;

    for skip in 0..9 {
        let eight: Vec<&ShareHandle> = (0..9).filter(|&i| i != skip).map(|i| &nine[i]).collect();
        match session.reconstruct(&eight) {
            Err(ProtocolError::IncompleteQuorum {
                present: 8,
                required: 9,
            }) => {}
            other => return Err(format!("8 handles without #{skip}: {other:?}")),
        }
    }
    // the old quorum's particles, now three of nine
    let same_wires = [&nine[0], &nine[3], &nine[6]];
    ensure(
        matches!(
            session.reconstruct(&same_wires),
            Err(ProtocolError::IncompleteQuorum { .. })
        ),
        || "the three original particles reconstructed".into(),
    )?;
    let old: Vec<&ShareHandle> = originals.iter().collect();
    ensure(
        matches!(
            session.reconstruct(&old),
            Err(ProtocolError::ShareConsumed(_))
        ),
        || "original handles still accepted by reconstruct".into(),
    )?;
    for h in &originals {
        ensure(
            matches!(session.split(h, 2), Err(ProtocolError::ShareConsumed(_))),
            || format!("original handle {} still splittable", h.id()),
        )?;
    }

    let all: Vec<&ShareHandle> = nine.iter().collect();
    let recovered = session.reconstruct(&all).map_err(err)?;
    let overlap = recovered.overlap(&secret);
    ensure(overlap >= 1.0 - 1e-10, || format!("overlap {overlap}"))?;
    Ok(format!("9 handles recover the secret (overlap {overlap:.12}); 8-handle and old-handle attempts rejected"))
}

fn criterion_8() -> Outcome {
    let secret =
        SecretQubit::new(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)).map_err(err)?;
    let expected = secret.leakage_fidelity();

    let start = Instant::now();
    let (mut session, mut live) = deal_quantum(secret, 100).map_err(err)?;
    for k in [1, 50, 99] {
        let subset: Vec<&ShareHandle> = live.iter().take(k).collect();
        let report = session.analyze_subset(&subset).map_err(err)?;
        ensure(!report.reduced_state.is_dense(), || {
            "n = 100 analysis went dense".into()
        })?;
        ensure((report.purity - expected).abs() <= 1e-10, || {
            format!("k = {k}: purity {}", report.purity)
        })?;
    }
    let victim = live.remove(0);
    live.extend(session.split(&victim, 3).map_err(err)?);
    let all: Vec<&ShareHandle> = live.iter().collect();
    let recovered = session.reconstruct(&all).map_err(err)?;
    let compact_time = start.elapsed();
    ensure(recovered.equals_up_to_phase(&secret), || {
        "n = 102 reconstruction failed".into()
    })?;
    ensure(compact_time < Duration::from_secs(1), || {
        format!("n = 100 run took {compact_time:?}")
    })?;

    let start = Instant::now();
    let dense = GhzForm::from_secret(&secret, 20)
        .map_err(err)?
        .expand()
        .map_err(err)?;
    let rho = partial_trace(&dense, &[0]).map_err(err)?;
    let purity = rho.purity();
    let dense_time = start.elapsed();
    ensure((purity - expected).abs() <= 1e-10, || {
        format!("n = 20 purity {purity}")
    })?;
    ensure(dense_time < Duration::from_secs(10), || {
        format!("n = 20 dense path took {dense_time:?}")
    })?;
    Ok(format!(
        "n = 100 lifecycle in {compact_time:?}; dense n = 20 trace and purity in {dense_time:?}"
    ))
}

fn main() -> ExitCode {
    let sweep = subset_sweep();
    let from_sweep = |f: fn(&Sweep) -> Outcome| sweep.as_ref().map_err(Clone::clone).and_then(f);
    let results = [
        ("worked example", criterion_1()),
        ("linear solve", criterion_2()),
        ("old-share attack", criterion_3()),
        ("subset purity", from_sweep(criterion_4)),
        ("subset fidelity", from_sweep(criterion_5)),
        ("perfect hiding", criterion_6()),
        ("threshold change", criterion_7()),
        ("scale", criterion_8()),
    ];
    let mut failed = 0;
    for (i, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
