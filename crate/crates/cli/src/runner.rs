//! Executes scenarios against the core library.
//!
//! Every random choice is drawn from one ChaCha20 stream seeded with the
//! scenario seed (`ChaCha20Rng::seed_from_u64`), in a fixed order.

use std::collections::BTreeSet;
use std::f64::consts::FRAC_PI_2;

use qtcss_core::classical::{
    attack_with_old_shares, build_truncated_system, deal, deal_from_polynomial,
    default_eval_points, reconstruct_from_columns, reconstruct_from_rows, reconstruct_truncated,
    reference_polynomial, AttackMethod, ClassicalError, ClassicalShare,
};
use qtcss_core::field::{BivariatePoly, PrimeField};
use qtcss_core::protocol::{
    deal_quantum, decode_leaked_bit, encode_bit, hiding_report, ClassicalBitEncoding,
    ProtocolError, SessionEvent, ShareHandle, DENSE_PROTOCOL_LIMIT,
};
use qtcss_core::quantum::MeasurementBasis;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::report::{fmt12, fmt12_complex, Cell, RunReport, Table};
use crate::scenario::{Parameters, Scenario, ScenarioKind, SplitStep, Stage};
use crate::CliError;

const PURITY_TOLERANCE: f64 = 1e-10;
const HIDING_TOLERANCE: f64 = 1e-12;
const OVERLAP_TOLERANCE: f64 = 1e-10;

fn invalid(field: &str, message: impl Into<String>) -> CliError {
    CliError::InvalidScenario {
        field: field.to_string(),
        message: message.into(),
    }
}

pub fn run_scenario(scenario: &Scenario) -> Result<RunReport, CliError> {
    scenario.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(scenario.seed);
    let mut report = RunReport::new(scenario);
    match scenario.kind {
        ScenarioKind::ClassicalDemo => classical_demo(scenario, &mut rng, &mut report)?,
        ScenarioKind::ClassicalAttack => classical_attack(scenario, &mut rng, &mut report)?,
        ScenarioKind::QuantumLifecycle => quantum_lifecycle(scenario, &mut report)?,
        ScenarioKind::LeakageSweep => leakage_sweep(scenario, &mut report)?,
        ScenarioKind::HidingTest => hiding_test(scenario, &mut rng, &mut report)?,
    }
    Ok(report)
}

enum Source {
    Reference,
    Explicit,
    Random,
}

struct Dealing {
    poly: BivariatePoly,
    shares: Vec<ClassicalShare>,
    source: Source,
}

fn field_of(p: &Parameters) -> Result<PrimeField, CliError> {
    PrimeField::new(p.modulus.unwrap_or(11))
        .map_err(|e| invalid("parameters.modulus", e.to_string()))
}

fn check_parties(parties: usize, poly_field: PrimeField, y_degree: usize) -> Result<(), CliError> {
    if parties < y_degree + 1 {
        return Err(invalid(
            "parameters.parties",
            format!(
                "{parties} parties cannot reach the top threshold {}",
                y_degree + 1
            ),
        ));
    }
    if parties as u64 >= poly_field.modulus() as u64 {
        return Err(invalid(
            "parameters.parties",
            format!("{parties} parties need a modulus above {parties}"),
        ));
    }
    Ok(())
}

fn degrees(p: &Parameters) -> Result<(usize, usize), CliError> {
    let (dx, dy) = (p.x_degree.unwrap_or(1), p.y_degree.unwrap_or(3));
    if dx < 1 {
        return Err(invalid("parameters.x_degree", "must be at least 1"));
    }
    if dy < dx + 1 {
        return Err(invalid(
            "parameters.y_degree",
            format!("must exceed x_degree {dx}"),
        ));
    }
    Ok((dx, dy))
}

/// The reference polynomial unless the scenario overrides the dealing.
fn resolve_dealing(p: &Parameters, rng: &mut ChaCha20Rng) -> Result<Dealing, CliError> {
    let (poly, source) = if let Some(rows) = &p.polynomial {
        let implied = [
            ("secret", p.secret.is_some()),
            ("x_degree", p.x_degree.is_some()),
            ("y_degree", p.y_degree.is_some()),
        ];
        if let Some((name, _)) = implied.iter().find(|(_, given)| *given) {
            return Err(invalid(
                &format!("parameters.{name}"),
                "implied by parameters.polynomial",
            ));
        }
        let field = field_of(p)?;
        let refs: Vec<&[u64]> = rows.iter().map(Vec::as_slice).collect();
        let poly = BivariatePoly::from_grid(field, &refs)
            .map_err(|e| invalid("parameters.polynomial", e.to_string()))?;
        if poly.x_degree() < 1 || poly.y_degree() < poly.x_degree() + 1 {
            return Err(invalid(
                "parameters.polynomial",
                "needs at least two rows and more columns than rows",
            ));
        }
        (poly, Source::Explicit)
    } else if p.modulus.is_none()
        && p.secret.is_none()
        && p.x_degree.is_none()
        && p.y_degree.is_none()
    {
        (reference_polynomial(), Source::Reference)
    } else {
        let field = field_of(p)?;
        let (dx, dy) = degrees(p)?;
        let secret = p.secret.unwrap_or(7);
        if secret >= field.modulus() as u64 {
            return Err(invalid(
                "parameters.secret",
                format!("must be below the modulus {}", field.modulus()),
            ));
        }
        let poly = BivariatePoly::random(field, dx, dy, field.element(secret), rng)
            .map_err(|e| invalid("parameters", e.to_string()))?;
        (poly, Source::Random)
    };
    let parties = p.parties.unwrap_or(poly.y_degree() + 2);
    check_parties(parties, poly.field(), poly.y_degree())?;
    let shares = deal_from_polynomial(&poly, parties)?;
    Ok(Dealing {
        poly,
        shares,
        source,
    })
}

fn describe_dealing(report: &mut RunReport, d: &Dealing) {
    let origin = match d.source {
        Source::Reference => "reference polynomial",
        Source::Explicit => "polynomial from the scenario",
        Source::Random => "random polynomial",
    };
    report.step(
        "deal",
        format!(
            "{origin} F(x, y) = {} over GF({}), secret {}, x-degree {}, y-degree {}, {} parties",
            d.poly,
            d.poly.field().modulus(),
            d.poly.secret(),
            d.poly.x_degree(),
            d.poly.y_degree(),
            d.shares.len()
        ),
    );
}

fn coeff_list(values: impl IntoIterator<Item = u32>) -> String {
    let parts: Vec<String> = values.into_iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(","))
}

fn classical_demo(
    s: &Scenario,
    rng: &mut ChaCha20Rng,
    report: &mut RunReport,
) -> Result<(), CliError> {
    let d = resolve_dealing(&s.parameters, rng)?;
    describe_dealing(report, &d);
    let (dx, dy) = (d.poly.x_degree(), d.poly.y_degree());
    let secret = d.poly.secret();

    let mut shares = Table::new(&["party", "f_row", "f_col"]);
    for share in &d.shares {
        shares.push(vec![
            share.party_id().into(),
            coeff_list(
                share
                    .f_row()
                    .padded_coefficients(dy)
                    .iter()
                    .map(|c| c.value()),
            )
            .into(),
            coeff_list(
                share
                    .f_col()
                    .padded_coefficients(dx)
                    .iter()
                    .map(|c| c.value()),
            )
            .into(),
        ]);
    }
    report.table("shares", shares);

    let mut outcomes = Table::new(&["path", "threshold", "parties", "recovered"]);
    let mut record = |report: &mut RunReport,
                      path: &str,
                      threshold: usize,
                      result: Result<u32, ClassicalError>| {
        let ids = coeff_list(1..=threshold as u32);
        let (recovered, pass, detail) = match result {
            Ok(v) => (
                Cell::from(v as usize),
                v == secret.value(),
                format!("parties {ids} recover {v}"),
            ),
            Err(e) => (
                Cell::from("error"),
                false,
                format!("parties {ids} failed: {e}"),
            ),
        };
        outcomes.push(vec![path.into(), threshold.into(), ids.into(), recovered]);
        report.verdict(&format!("{path}-recover-secret"), pass, detail);
    };

    let low = reconstruct_from_rows(&d.shares[..dx + 1]).map(|v| v.value());
    report.step(
        "reconstruct",
        format!("threshold {} from F(i, 0) of the rows", dx + 1),
    );
    record(report, "rows", dx + 1, low);

    let truncated: Vec<_> = d.shares[..dy]
        .iter()
        .map(ClassicalShare::truncate)
        .collect();
    let ids: Vec<u32> = truncated.iter().map(|t| t.party_id()).collect();
    let mut middle = Err(ClassicalError::InsufficientShares {
        needed: dy,
        found: 0,
    });
    let mut system_table = Table::new(&["party", "y", "rhs"]);
    for shift in 0..d.poly.field().modulus() as u64 {
        let points = default_eval_points(d.poly.field(), &ids, dx + 1, shift);
        let system = build_truncated_system(&truncated, &points)?;
        match system.solve() {
            Ok(solution) => {
                for ((party, y), rhs) in system.points.iter().zip(&system.rhs) {
                    system_table.push(vec![
                        (*party).into(),
                        (y.value() as usize).into(),
                        (rhs.value() as usize).into(),
                    ]);
                }
                report.step(
                    "reconstruct",
                    format!(
                        "threshold {dy} from rows truncated to y-degree {}: {n}x{n} system at schedule shift {shift} solves to {}",
                        dy - 1,
                        coeff_list(solution.iter().map(|c| c.value())),
                        n = solution.len()
                    ),
                );
                middle = reconstruct_truncated(&truncated, &points).map(|v| v.value());
                break;
            }
            Err(e) => {
                report.step(
                    "reconstruct",
                    format!("schedule shift {shift} gives a singular system ({e}); retrying"),
                );
                middle = Err(e);
            }
        }
    }
    report.table("truncated-system", system_table);
    record(report, "truncated", dy, middle);

    let high = reconstruct_from_columns(&d.shares[..dy + 1]).map(|v| v.value());
    report.step(
        "reconstruct",
        format!("threshold {} from F(0, i) of the columns", dy + 1),
    );
    record(report, "columns", dy + 1, high);
    report.table("reconstruction", outcomes);
    Ok(())
}

fn parse_colluders(
    p: &Parameters,
    parties: usize,
    needed: usize,
) -> Result<Option<Vec<u32>>, CliError> {
    let Some(ids) = &p.colluders else {
        return Ok(None);
    };
    let distinct: BTreeSet<u32> = ids.iter().copied().collect();
    if distinct.len() != ids.len() {
        return Err(invalid("parameters.colluders", "party listed twice"));
    }
    if let Some(bad) = ids.iter().find(|&&i| i == 0 || i as usize > parties) {
        return Err(invalid(
            "parameters.colluders",
            format!("party {bad} is not in 1..={parties}"),
        ));
    }
    if ids.len() < needed {
        return Err(invalid(
            "parameters.colluders",
            format!(
                "{} parties cannot interpolate; {needed} are needed",
                ids.len()
            ),
        ));
    }
    Ok(Some(ids.clone()))
}

fn pick(shares: &[ClassicalShare], ids: &[u32]) -> Vec<ClassicalShare> {
    ids.iter()
        .map(|&i| shares[i as usize - 1].clone())
        .collect()
}

fn classical_attack(
    s: &Scenario,
    rng: &mut ChaCha20Rng,
    report: &mut RunReport,
) -> Result<(), CliError> {
    let p = &s.parameters;
    let deals = p.deals.unwrap_or(1);
    if deals > 1 && p.polynomial.is_some() {
        return Err(invalid(
            "parameters.deals",
            "repeated deals need random polynomials, not parameters.polynomial",
        ));
    }
    let methods = match p.method {
        Some(m) => vec![m],
        None => vec![AttackMethod::ColumnPolyAtZero, AttackMethod::ReTruncation],
    };

    if deals == 1 {
        let d = resolve_dealing(p, rng)?;
        describe_dealing(report, &d);
        let dx = d.poly.x_degree();
        let declared = p.declared_threshold.unwrap_or(dx + 2);
        let ids = parse_colluders(p, d.shares.len(), dx + 1)?
            .unwrap_or_else(|| (1..=dx as u32 + 1).collect());
        report.step(
            "truncate",
            format!("the parties agree on threshold {declared}; parties {} keep their untruncated shares", coeff_list(ids.iter().copied())),
        );
        let colluding = pick(&d.shares, &ids);
        let truncated: Vec<_> = colluding.iter().map(ClassicalShare::truncate).collect();
        let points = default_eval_points(d.poly.field(), &ids, dx + 1, 0);
        let honest = reconstruct_truncated(&truncated, &points);
        report.step(
            "reconstruct",
            match &honest {
                Ok(v) => format!("truncated shares alone give {v}"),
                Err(e) => format!("truncated shares alone are rejected: {e}"),
            },
        );
        let mut all_recovered = true;
        let mut table = Table::new(&["method", "parties", "declared_threshold", "recovered"]);
        for &method in &methods {
            let transcript = attack_with_old_shares(&colluding, declared, method)?;
            for line in &transcript.narrative {
                report.step(method.label(), line.clone());
            }
            all_recovered &= transcript.recovered_secret == d.poly.secret();
            table.push(vec![
                method.label().into(),
                coeff_list(transcript.colluding_party_ids.iter().copied()).into(),
                declared.into(),
                (transcript.recovered_secret.value() as usize).into(),
            ]);
        }
        report.table("attack", table);
        let detail = if all_recovered {
            format!(
                "secret {} recovered; changed threshold void",
                d.poly.secret()
            )
        } else {
            "secret not recovered".to_string()
        };
        report.verdict("attack-succeeded", all_recovered, detail);
        return Ok(());
    }

    let field = field_of(p)?;
    let (dx, dy) = degrees(p)?;
    let parties = p.parties.unwrap_or(dy + 2);
    check_parties(parties, field, dy)?;
    let declared = p.declared_threshold.unwrap_or(dx + 2);
    let fixed_ids = parse_colluders(p, parties, dx + 1)?;
    if let Some(secret) = p.secret {
        if secret >= field.modulus() as u64 {
            return Err(invalid(
                "parameters.secret",
                format!("must be below the modulus {}", field.modulus()),
            ));
        }
    }
    report.step(
        "deal",
        format!("{deals} random dealings over GF({}), x-degree {dx}, y-degree {dy}, {parties} parties, declared threshold {declared}", field.modulus()),
    );
    let mut successes = 0;
    let mut table = Table::new(&["deal", "parties", "secret", "recovered"]);
    for k in 0..deals {
        let secret = match p.secret {
            Some(v) => field.element(v),
            None => field.random(rng),
        };
        let (_, shares) = deal(secret, parties, dx, dy, rng)?;
        let ids = match &fixed_ids {
            Some(ids) => ids.clone(),
            None => {
                let mut ids: Vec<u32> = sample(rng, parties, dx + 1)
                    .iter()
                    .map(|i| i as u32 + 1)
                    .collect();
                ids.sort_unstable();
                ids
            }
        };
        let colluding = pick(&shares, &ids);
        let recovered: Vec<u32> = methods
            .iter()
            .map(|&m| {
                attack_with_old_shares(&colluding, declared, m).map(|t| t.recovered_secret.value())
            })
            .collect::<Result<_, _>>()?;
        let ok = recovered.iter().all(|&v| v == secret.value());
        successes += usize::from(ok);
        table.push(vec![
            (k + 1).into(),
            coeff_list(ids.iter().copied()).into(),
            (secret.value() as usize).into(),
            coeff_list(recovered).into(),
        ]);
    }
    report.table("attacks", table);
    report.step(
        "attack",
        format!("{successes}/{deals} secrets recovered from old shares"),
    );
    report.verdict(
        "attack-succeeded",
        successes == deals,
        format!("{successes}/{deals} secrets recovered; changed threshold void"),
    );
    Ok(())
}

fn describe_event(event: &SessionEvent) -> String {
    match event {
        SessionEvent::Deal { parties } => format!("deal to {parties} parties"),
        SessionEvent::Split {
            handle,
            arity,
            threshold,
        } => {
            format!("split handle {handle} into {arity}; threshold {threshold}")
        }
        SessionEvent::Analyze {
            subset_size,
            purity,
            fidelity,
        } => format!(
            "analyze {subset_size} handles: purity {}, fidelity {}",
            fmt12(*purity),
            fmt12(*fidelity)
        ),
        SessionEvent::Reconstruct { parties } => format!("reconstruct from {parties} handles"),
        SessionEvent::Rejected { operation, reason } => format!("{operation} rejected: {reason}"),
    }
}

fn quantum_lifecycle(s: &Scenario, report: &mut RunReport) -> Result<(), CliError> {
    let p = &s.parameters;
    let secret = s.secret_qubit()?;
    let parties = p.parties.unwrap_or(3);
    let stage = p.stage.unwrap_or(Stage::Reconstruct);
    let schedule = match (&p.splits, stage) {
        (_, Stage::Deal) => {
            if p.splits.is_some() {
                return Err(invalid("parameters.splits", "not used when stage is deal"));
            }
            Vec::new()
        }
        (Some(splits), _) => splits.clone(),
        (None, _) => vec![SplitStep(0, 3); parties],
    };

    let (mut session, mut live) = deal_quantum(secret, parties)?;
    report.step(
        "deal",
        format!(
            "a = {}, b = {} shared among {parties} parties",
            fmt12_complex(secret.a().re, secret.a().im),
            fmt12_complex(secret.b().re, secret.b().im)
        ),
    );

    let mut consumed: Vec<ShareHandle> = Vec::new();
    let mut thresholds = Table::new(&["step", "split_handle", "arity", "threshold"]);
    thresholds.push(vec![0usize.into(), "-".into(), "-".into(), parties.into()]);
    let mut monotone = true;
    for (n, step) in schedule.iter().enumerate() {
        if step.index() >= live.len() {
            return Err(invalid(
                "parameters.splits",
                format!(
                    "step {}: index {} but only {} live handles",
                    n + 1,
                    step.index(),
                    live.len()
                ),
            ));
        }
        let before = session.threshold();
        let victim = live.remove(step.index());
        live.extend(session.split(&victim, step.arity())?);
        monotone &= session.threshold() == before + step.arity() - 1;
        report.step(
            "split",
            format!(
                "handle {} into {}; threshold {before} -> {}",
                victim.id(),
                step.arity(),
                session.threshold()
            ),
        );
        thresholds.push(vec![
            (n + 1).into(),
            (victim.id() as usize).into(),
            step.arity().into(),
            session.threshold().into(),
        ]);
        consumed.push(victim);
    }
    report.table("thresholds", thresholds);
    let expected = parties + schedule.iter().map(|s| s.arity() - 1).sum::<usize>();
    report.verdict(
        "threshold-raised",
        monotone && session.threshold() == expected,
        format!("threshold {parties} -> {}", session.threshold()),
    );

    if session.threshold() <= DENSE_PROTOCOL_LIMIT {
        let gap = session
            .replay_dense()?
            .max_abs_diff(&session.state().expand().map_err(ProtocolError::from)?)
            .map_err(ProtocolError::from)?;
        report.verdict(
            "compact-dense-agree",
            gap <= 1e-12,
            format!("CNOT replay and closed form differ by {}", fmt12(gap)),
        );
    }

    if stage != Stage::Deal {
        let rejected = consumed
            .iter()
            .filter(|h| matches!(session.split(h, 2), Err(ProtocolError::ShareConsumed(_))))
            .count();
        report.verdict(
            "consumed-handles-rejected",
            rejected == consumed.len(),
            format!("{rejected}/{} consumed handles refused", consumed.len()),
        );
    }

    if stage == Stage::Reconstruct {
        let total = live.len();
        let mut refused = 0;
        for skip in 0..total {
            let partial: Vec<&ShareHandle> = live
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, h)| h)
                .collect();
            if total > 1
                && matches!(
                    session.reconstruct(&partial),
                    Err(ProtocolError::IncompleteQuorum { .. })
                )
            {
                refused += 1;
            }
        }
        if total > 1 {
            report.step(
                "reconstruct",
                format!(
                    "every set of {} handles refused with IncompleteQuorum: {refused}/{total}",
                    total - 1
                ),
            );
            report.verdict(
                "incomplete-quorum-rejected",
                refused == total,
                format!(
                    "{refused}/{total} attempts with {} handles refused",
                    total - 1
                ),
            );
        }
        let all: Vec<&ShareHandle> = live.iter().collect();
        let recovered = session.reconstruct(&all)?;
        let overlap = recovered.overlap(&secret);
        report.step(
            "reconstruct",
            format!(
                "all {total} handles recover the secret with overlap {}",
                fmt12(overlap)
            ),
        );
        report.verdict(
            "secret-recovered",
            overlap >= 1.0 - OVERLAP_TOLERANCE,
            format!("overlap {}", fmt12(overlap)),
        );
    }

    for event in session.transcript() {
        report.step("session", describe_event(&event));
    }
    Ok(())
}

fn leakage_sweep(s: &Scenario, report: &mut RunReport) -> Result<(), CliError> {
    let secret = s.secret_qubit()?;
    let parties = s.parameters.parties.unwrap_or(9);
    if parties < 2 {
        return Err(invalid(
            "parameters.parties",
            "a sweep needs at least 2 parties",
        ));
    }
    let expected = secret.leakage_fidelity();
    let (session, handles) = deal_quantum(secret, parties)?;
    report.step(
        "deal",
        format!("{parties} parties; |a|^4 + |b|^4 = {}", fmt12(expected)),
    );

    let mut table = Table::new(&["subset_size", "purity", "fidelity", "mixed"]);
    let (mut purity_err, mut all_mixed) = (0.0f64, true);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for k in 1..parties {
        let subset: Vec<&ShareHandle> = handles.iter().take(k).collect();
        let r = session.analyze_subset(&subset)?;
        purity_err = purity_err.max((r.purity - expected).abs());
        all_mixed &= r.is_mixed && r.purity < 1.0 - PURITY_TOLERANCE;
        lo = lo.min(r.fidelity);
        hi = hi.max(r.fidelity);
        table.push(vec![
            k.into(),
            r.purity.into(),
            r.fidelity.into(),
            if r.is_mixed { "yes" } else { "no" }.into(),
        ]);
    }
    report.table("leakage", table);
    report.verdict(
        "purity-matches",
        purity_err <= PURITY_TOLERANCE,
        format!(
            "largest deviation from |a|^4 + |b|^4 is {}",
            fmt12(purity_err)
        ),
    );
    report.verdict(
        "subsets-mixed",
        all_mixed,
        format!("every proper subset of {parties} is mixed"),
    );
    report.verdict(
        "fidelity-constant",
        hi - lo <= PURITY_TOLERANCE && (lo - expected).abs() <= PURITY_TOLERANCE,
        format!(
            "fidelity {} for every subset size, spread {}",
            fmt12(lo),
            fmt12(hi - lo)
        ),
    );

    // x² + (1 - x)² on a 1e-3 grid
    let (min_x, min_f) = (0..=1000)
        .map(|i| {
            let x = i as f64 * 1e-3;
            (x, x * x + (1.0 - x) * (1.0 - x))
        })
        .fold((f64::NAN, f64::INFINITY), |best, cur| {
            if cur.1 < best.1 {
                cur
            } else {
                best
            }
        });
    report.step(
        "sweep",
        format!(
            "grid minimum of x^2 + (1 - x)^2 is {} at x = {}",
            fmt12(min_f),
            fmt12(min_x)
        ),
    );
    report.verdict(
        "fidelity-minimum",
        (min_x - 0.5).abs() <= 1e-3 && (min_f - 0.5).abs() <= 1e-6,
        format!(
            "minimum fidelity {} at |a|^2 = {}",
            fmt12(min_f),
            fmt12(min_x)
        ),
    );
    Ok(())
}

fn hiding_test(
    s: &Scenario,
    rng: &mut ChaCha20Rng,
    report: &mut RunReport,
) -> Result<(), CliError> {
    let p = &s.parameters;
    let parties = p.parties.unwrap_or(3);
    if parties < 2 {
        return Err(invalid(
            "parameters.parties",
            "hiding needs at least 2 parties",
        ));
    }
    let omega = p.omega.unwrap_or(0.0);
    let theta = p.theta.unwrap_or(FRAC_PI_2);
    let basis = MeasurementBasis::new(theta, omega)
        .map_err(|e| invalid("parameters.theta", e.to_string()))?;
    let encoding = ClassicalBitEncoding::from_basis(basis);
    let trials = p.trials.unwrap_or(10_000);

    let sessions = [false, true].map(|bit| deal_quantum(encode_bit(bit, &encoding), parties));
    let [zero, one] = sessions;
    let (zero, h0) = zero?;
    let (one, h1) = one?;
    report.step(
        "deal",
        format!(
            "bits 0 and 1 encoded at theta = {}, omega = {} and shared among {parties} parties",
            fmt12(theta),
            fmt12(omega)
        ),
    );

    let mut table = Table::new(&["subset_size", "difference"]);
    let mut worst = 0.0f64;
    for k in 1..parties {
        let a: Vec<&ShareHandle> = h0.iter().take(k).collect();
        let b: Vec<&ShareHandle> = h1.iter().take(k).collect();
        let diff = hiding_report(
            &zero.analyze_subset(&a)?.reduced_state,
            &one.analyze_subset(&b)?.reduced_state,
        )?;
        worst = worst.max(diff);
        table.push(vec![k.into(), diff.into()]);
    }
    report.table("hiding", table);
    report.verdict(
        "hiding-perfect",
        worst < HIDING_TOLERANCE,
        format!(
            "largest difference between the bit-0 and bit-1 subset states is {}",
            fmt12(worst)
        ),
    );

    let leaked = [
        zero.analyze_subset(&[&h0[parties - 1]])?.reduced_state,
        one.analyze_subset(&[&h1[parties - 1]])?.reduced_state,
    ];
    let mut correct = 0usize;
    for _ in 0..trials {
        let bit: bool = rng.random();
        let guess = decode_leaked_bit(&leaked[usize::from(bit)], &encoding, rng)?;
        correct += usize::from(guess == bit);
    }
    let frequency = correct as f64 / trials as f64;
    let sigma = (0.25 / trials as f64).sqrt();
    report.step(
        "decode",
        format!("{correct}/{trials} bits guessed from one particle"),
    );
    let mut decode = Table::new(&["trials", "correct", "frequency", "sigma"]);
    decode.push(vec![
        trials.into(),
        correct.into(),
        frequency.into(),
        sigma.into(),
    ]);
    report.table("decode", decode);
    report.verdict(
        "decode-uniform",
        (frequency - 0.5).abs() <= 3.0 * sigma,
        format!(
            "recovery frequency {} against 0.5 +- {}",
            fmt12(frequency),
            fmt12(3.0 * sigma)
        ),
    );
    Ok(())
}
