//! One function per subcommand.

use maxdyn_core::{
    check_invariance, classify, density_report, detect_period, lyness_h, lyness_h_unreduced,
    lyness_step, nearby_periodic, predict_accumulation, predict_periodicity, step_forward,
    trace_routes, tropical_limit_residual, unreduced_eq, Certificate, InvariantId, LynessState,
    Rational, Scalar, Verdict,
};

use crate::config::RunConfig;
use crate::output::{fmt_float, Sink};
use crate::{CliError, Command, OutputFormat};

pub fn run(command: Command) -> Result<(), CliError> {
    let cfg = RunConfig::from_args(command.common())?;
    match command {
        Command::Iterate(_) => iterate(&cfg),
        Command::Classify(_) => classify_cmd(&cfg),
        Command::Trace(_) => trace(&cfg),
        Command::Period(_) => period(&cfg),
        Command::Predict(_) => predict(&cfg),
        Command::Density(_) => density(&cfg),
        Command::Neighbors(_) => neighbors(&cfg),
        Command::Invariants(_) => invariants(&cfg),
        Command::Lyness(_) => lyness(&cfg),
        Command::Export(_) => export(&cfg),
    }
}

const EXPORT_FLOAT_ERROR: f64 = 1e-12;

fn iterate(cfg: &RunConfig) -> Result<(), CliError> {
    let w = cfg.tuple()?;
    let steps = cfg.steps.unwrap_or(10);
    let mut sink = Sink::open(&cfg.out)?;
    if cfg.format == OutputFormat::Csv {
        sink.line("n,exact,float")?;
    }
    let mut cur = w;
    for n in 0..=steps {
        let value = cur.x1();
        let f = value.to_float(EXPORT_FLOAT_ERROR);
        match cfg.format {
            OutputFormat::Csv => sink.line(&format!("{},{},{}", n + 1, value, fmt_float(f)))?,
            OutputFormat::JsonLines => sink.line(&
                serde_json::json!({ "n": n + 1, "exact": value.to_string(), "float": f })
                    .to_string(),
            )?,
        }
        cur = step_forward(&cur);
    }
    sink.finish()?;
    Ok(())
}

fn classify_cmd(cfg: &RunConfig) -> Result<(), CliError> {
    let w = cfg.tuple()?;
    let case = classify(&w)?;
    let mut sink = Sink::open(&cfg.out)?;
    sink.line(&case.to_string())?;
    sink.finish()?;
    Ok(())
}

fn trace(cfg: &RunConfig) -> Result<(), CliError> {
    let w = cfg.tuple()?;
    let max_cases = cfg.max_steps.unwrap_or(10_000) as usize;
    let trace = trace_routes(&w, max_cases)?;
    let mut sink = Sink::open(&cfg.out)?;
    let seq: Vec<String> = trace.cases.iter().map(|(c, _)| c.to_string()).collect();
    sink.line(&format!("cases: {}", seq.join(" ")))?;
    for (i, r) in trace.routes.iter().enumerate() {
        sink.line(&format!(
            "route {}: {} (m1={}, m3={}, steps={})",
            i + 1,
            r.route,
            r.m1,
            r.m3,
            r.steps
        ))?;
    }
    sink.line(&format!(
        "total: {} cases, {} steps, end window {}",
        trace.cases.len(),
        trace.steps_total,
        trace.end_window
    ))?;
    sink.finish()?;
    Ok(())
}

fn period(cfg: &RunConfig) -> Result<(), CliError> {
    let w = cfg.tuple()?;
    let max_steps = cfg.max_steps.unwrap_or(100_000);
    let mut sink = Sink::open(&cfg.out)?;
    match detect_period(&w, max_steps) {
        Some(p) => sink.line(&p.to_string())?,
        None => {
            // no observed return: report the exact verdict instead
            let report = predict_periodicity(&w)?;
            match (report.verdict, report.certificate) {
                (Verdict::NonPeriodic, _) => {
                    sink.line("non-periodic (sigma is irrational); no period exists")?
                }
                (Verdict::Periodic, Certificate::SigmaRational(q)) => sink.line(&format!(
                    "periodic (sigma = {q}) but no return within {max_steps} steps"
                ))?,
                (Verdict::Periodic, _) => sink.line(&format!(
                    "periodic but no return within {max_steps} steps"
                ))?,
            }
        }
    }
    sink.finish()?;
    Ok(())
}

fn predict(cfg: &RunConfig) -> Result<(), CliError> {
    let w = cfg.tuple()?;
    let prediction = predict_accumulation(&w)?;
    let mut sink = Sink::open(&cfg.out)?;
    sink.line(&format!("c4: {}", prediction.c4_tuple))?;
    sink.line("sigma: irrational")?;
    sink.line(&format!("interval: [{}, {}]", prediction.lo, prediction.hi))?;
    sink.line(&format!(
        "interval_float: [{}, {}]",
        fmt_float(prediction.lo.to_float(EXPORT_FLOAT_ERROR)),
        fmt_float(prediction.hi.to_float(EXPORT_FLOAT_ERROR))
    ))?;
    sink.finish()?;
    Ok(())
}

fn density(cfg: &RunConfig) -> Result<(), CliError> {
    let w = cfg.tuple()?;
    let n = cfg.steps.unwrap_or(10_000);
    let report = density_report(&w, n, cfg.epsilon)?;
    let mut sink = Sink::open(&cfg.out)?;
    sink.line(&format!("n_steps: {}", report.n_steps))?;
    sink.line(&format!("epsilon: {}", fmt_float(report.epsilon)))?;
    sink.line(&format!(
        "interval: [{}, {}]",
        fmt_float(report.interval.0),
        fmt_float(report.interval.1)
    ))?;
    sink.line(&format!("violations: {}", report.violations))?;
    sink.line(&format!("max_gap: {}", fmt_float(report.max_gap)))?;
    sink.finish()?;
    Ok(())
}

fn neighbors(cfg: &RunConfig) -> Result<(), CliError> {
    let w = cfg.tuple()?;
    let list = nearby_periodic(&w, cfg.count)?;
    // pure, independent verifications: run them in parallel and join
    let observed: Vec<Option<u64>> = if cfg.verify {
        std::thread::scope(|scope| {
            let handles: Vec<_> = list
                .iter()
                .map(|nb| {
                    let tuple = nb.tuple.clone();
                    let cap = nb.predicted_period + 1;
                    scope.spawn(move || detect_period(&tuple, cap))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("verifier")).collect()
        })
    } else {
        vec![None; list.len()]
    };
    let mut sink = Sink::open(&cfg.out)?;
    for (nb, seen) in list.iter().zip(observed) {
        let mut line = format!(
            "convergent={} p={} q={} predicted_period={} tuple={}",
            nb.convergent, nb.p, nb.q, nb.predicted_period, nb.tuple
        );
        if cfg.verify {
            match seen {
                Some(p) => line.push_str(&format!(" observed={p} ok={}", p == nb.predicted_period)),
                None => line.push_str(" observed=none ok=false"),
            }
        }
        sink.line(&line)?;
    }
    sink.finish()?;
    Ok(())
}

fn invariants(cfg: &RunConfig) -> Result<(), CliError> {
    let w = cfg.tuple()?;
    let (v1, v2) = (maxdyn_core::v1(&w), maxdyn_core::v2(&w));
    let mut sink = Sink::open(&cfg.out)?;
    sink.line(&format!("v1: {} ({})", v1, fmt_float(v1.to_float(EXPORT_FLOAT_ERROR))))?;
    sink.line(&format!("v2: {} ({})", v2, fmt_float(v2.to_float(EXPORT_FLOAT_ERROR))))?;
    let steps = cfg.steps.unwrap_or(1_000);
    sink.line(&format!(
        "conserved over {} steps: {}",
        steps,
        check_invariance(&w, steps)
    ))?;
    if cfg.tropical_eps.is_some() {
        for eps in cfg.tropical_eps_list()? {
            let r1 = tropical_limit_residual(&w, InvariantId::V1, eps)?;
            let r2 = tropical_limit_residual(&w, InvariantId::V2, eps)?;
            sink.line(&format!(
                "tropical eps={}: residual_v1={} residual_v2={}",
                fmt_float(eps),
                fmt_float(r1),
                fmt_float(r2)
            ))?;
        }
    }
    sink.finish()?;
    Ok(())
}

fn lyness(cfg: &RunConfig) -> Result<(), CliError> {
    let lits = cfg.tuple()?;
    let steps = cfg.steps.unwrap_or(100);
    let a_lit: Scalar = cfg.param.parse()?;
    let mut sink = Sink::open(&cfg.out)?;
    if cfg.float {
        let coord = |s: &Scalar| s.to_float(EXPORT_FLOAT_ERROR);
        let mut st = LynessState::new(
            coord(lits.x1()),
            coord(lits.x2()),
            coord(lits.x3()),
            coord(lits.x4()),
            coord(&a_lit),
        );
        let h1_0 = lyness_h(&st, InvariantId::V1)?;
        let h2_0 = lyness_h(&st, InvariantId::V2)?;
        sink.line(&format!("h1: {}", fmt_float(h1_0)))?;
        sink.line(&format!("h2: {}", fmt_float(h2_0)))?;
        let mut drift1 = 0.0f64;
        let mut drift2 = 0.0f64;
        for _ in 0..steps {
            st = lyness_step(&st)?;
            drift1 = drift1.max((lyness_h(&st, InvariantId::V1)? - h1_0).abs());
            drift2 = drift2.max((lyness_h(&st, InvariantId::V2)? - h2_0).abs());
        }
        sink.line(&format!(
            "float drift over {} steps: h1={} h2={}",
            steps,
            fmt_float(drift1),
            fmt_float(drift2)
        ))?;
    } else {
        let coord = |s: &Scalar| -> Result<Rational, CliError> {
            if s.is_rational() {
                Ok(s.rational_part())
            } else {
                Err(CliError::Precondition(
                    "lyness exact mode needs rational coordinates (use --float for radicals)"
                        .into(),
                ))
            }
        };
        let mut st = LynessState::new(
            coord(lits.x1())?,
            coord(lits.x2())?,
            coord(lits.x3())?,
            coord(lits.x4())?,
            coord(&a_lit)?,
        );
        let h1_0 = lyness_h(&st, InvariantId::V1)?;
        let h2_0 = lyness_h(&st, InvariantId::V2)?;
        sink.line(&format!("h1: {h1_0}"))?;
        sink.line(&format!("h2: {h2_0}"))?;
        let raw1 = lyness_h_unreduced(&st, InvariantId::V1)?;
        let raw2 = lyness_h_unreduced(&st, InvariantId::V2)?;
        let mut conserved = true;
        for _ in 0..steps {
            st = lyness_step(&st)?;
            conserved &= unreduced_eq(&lyness_h_unreduced(&st, InvariantId::V1)?, &raw1)
                && unreduced_eq(&lyness_h_unreduced(&st, InvariantId::V2)?, &raw2);
        }
        sink.line(&format!("exactly conserved over {steps} steps: {conserved}"))?;
    }
    sink.finish()?;
    Ok(())
}

fn export(cfg: &RunConfig) -> Result<(), CliError> {
    let w = cfg.tuple()?;
    let n = cfg.steps.unwrap_or(10_000);
    let [i, j, k] = cfg.coords()?;
    let mut sink = Sink::open(&cfg.out)?;
    if cfg.format == OutputFormat::Csv {
        sink.line("n,exact_x,exact_y,exact_z,x,y,z")?;
    }
    let mut cur = w;
    for row in 0..n {
        let e = cur.entries();
        let (a, b, c) = (&e[i - 1], &e[j - 1], &e[k - 1]);
        let (fa, fb, fc) = (
            a.to_float(EXPORT_FLOAT_ERROR),
            b.to_float(EXPORT_FLOAT_ERROR),
            c.to_float(EXPORT_FLOAT_ERROR),
        );
        match cfg.format {
            OutputFormat::Csv => sink.line(&format!(
                "{row},{a},{b},{c},{},{},{}",
                fmt_float(fa),
                fmt_float(fb),
                fmt_float(fc)
            ))?,
            OutputFormat::JsonLines => sink.line(
                &serde_json::json!({
                    "n": row,
                    "exact": [a.to_string(), b.to_string(), c.to_string()],
                    "float": [fa, fb, fc],
                })
                .to_string(),
            )?,
        }
        cur = step_forward(&cur);
    }
    sink.finish()?;
    Ok(())
}
