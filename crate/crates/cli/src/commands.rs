use std::fmt::{self, Write};
use std::path::Path;
use std::process::ExitCode;

use macjscc::engine::CLASS_PAIRS;
use macjscc::format::parse_model;
use macjscc::gallager::{e_s, e_s_prime};
use macjscc::model::Class;
use macjscc::oracle;
use macjscc::paperex::{fixture, FIXTURE_NAME};
use macjscc::search::Boundary;
use macjscc::{
    classexp, EngineOptions, ErrorType, ExponentEngine, ExtReal, Registry, SystemModel, User,
};

use crate::output::{csv_field, sig9, Unit};
use crate::{Command, Common, TauArg};

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Numeric(m) => f.write_str(m),
        }
    }
}

impl From<macjscc::Error> for CliError {
    fn from(e: macjscc::Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Numeric(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn load_model(common: &Common) -> CliResult<SystemModel> {
    let name = common
        .model_arg
        .as_deref()
        .or(common.model_flag.as_deref())
        .unwrap_or(FIXTURE_NAME);
    let path = Path::new(name);
    let mut model = if path.exists() {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read model '{name}': {e}")))?;
        parse_model(&text).map_err(|e| CliError::Input(format!("{name}: {e}")))?
    } else if let Some(m) = fixture(name) {
        m
    } else {
        return Err(CliError::Input(format!(
            "model '{name}' is neither a readable file nor a built-in fixture \
             (available: {FIXTURE_NAME})"
        )));
    };
    if let Some(g) = &common.gamma {
        if g.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(CliError::Input(format!(
                "thresholds must lie in [0, 1], got {} {}",
                g[0], g[1]
            )));
        }
        model.policy.gamma = Some([g[0], g[1]]);
    }
    Ok(model)
}

fn build_engine(common: &Common, model: &SystemModel) -> CliResult<ExponentEngine> {
    if common.jobs == 0 {
        return Err(CliError::Input("--jobs must be at least 1".into()));
    }
    let opts = EngineOptions {
        grid: common.grid.unwrap_or(64),
        hull_grid: common.hull_grid,
        gamma_tol: common.tol,
        jobs: common.jobs,
        ..EngineOptions::default()
    };
    ExponentEngine::new(model, opts).map_err(|e| CliError::Input(e.to_string()))
}

fn thresholds(engine: &ExponentEngine, common: &Common) -> CliResult<[f64; 2]> {
    if let Some(g) = engine.model().policy.gamma {
        return Ok(g);
    }
    let registry = Registry::with_defaults();
    Ok(registry.solver(&common.solver)?.solve(engine)?.0)
}

fn tau_label(tau: ErrorType) -> String {
    csv_field(tau.label())
}

pub fn run(command: Command, out: &mut String) -> CliResult<ExitCode> {
    match command {
        Command::Exponent { common, strategy } => exponent(&common, strategy.as_deref(), out),
        Command::Bounds { common } => bounds(&common, out),
        Command::Thresholds { common } => thresholds_cmd(&common, out),
        Command::Tables { common } => tables(&common, out),
        Command::Sweep {
            common,
            rho,
            tau,
            classes,
        } => {
            if rho {
                sweep_rho(&common, tau, &classes, out)
            } else {
                sweep_gamma(&common, out)
            }
        }
        Command::Verify { common } => verify(&common, out),
        Command::Validate { common } => validate(&common, out),
    }
}

fn exponent(common: &Common, strategy: Option<&str>, out: &mut String) -> CliResult<ExitCode> {
    let model = load_model(common)?;
    let engine = build_engine(common, &model)?;
    let registry = Registry::with_defaults();
    let solver = registry.solver(&common.solver)?;
    let unit = Unit { bits: common.bits };
    if let Some(name) = strategy {
        let v = registry.strategy(name)?.evaluate(&engine, solver)?;
        writeln!(out, "{name:<10} {}", unit.fixed(v.into(), 6)).unwrap();
        return Ok(ExitCode::SUCCESS);
    }
    let r = engine.achievable_with(solver)?;
    let lines = [
        ("unit", unit.name().to_string()),
        ("exponent", unit.fixed(r.exponent.into(), 6)),
        ("gamma1", format!("{:.6}", r.gamma_star[0])),
        ("gamma2", format!("{:.6}", r.gamma_star[1])),
        ("lower", unit.fixed(r.lower.value.into(), 6)),
        ("upper", unit.fixed(r.upper.value.into(), 6)),
        ("gain", format!("{:.4}%", 100.0 * r.gain_over_lower())),
        ("solver", r.trace.solver.to_string()),
    ];
    for (k, v) in lines {
        writeln!(out, "{k:<10} {v}").unwrap();
    }
    Ok(ExitCode::SUCCESS)
}

fn bounds(common: &Common, out: &mut String) -> CliResult<ExitCode> {
    let model = load_model(common)?;
    let engine = build_engine(common, &model)?;
    let unit = Unit { bits: common.bits };
    let lo = macjscc::bounds::lower_bound(&engine);
    let up = macjscc::bounds::upper_bound(&engine);
    writeln!(out, "unit       {}", unit.name()).unwrap();
    writeln!(
        out,
        "lower      {}  classes ({},{})",
        unit.fixed(lo.value.into(), 6),
        lo.best.0,
        lo.best.1
    )
    .unwrap();
    writeln!(
        out,
        "upper      {}  tau {}",
        unit.fixed(up.value.into(), 6),
        up.tau_star.label()
    )
    .unwrap();
    for c in &up.table {
        let other = c
            .other_class
            .map_or(String::new(), |k| format!("  other class {k}"));
        writeln!(
            out,
            "upper{:<5} {}  rho {:.6}{other}",
            c.tau.label(),
            unit.fixed(c.value.into(), 6),
            c.rho_star
        )
        .unwrap();
    }
    Ok(ExitCode::SUCCESS)
}

fn thresholds_cmd(common: &Common, out: &mut String) -> CliResult<ExitCode> {
    let model = load_model(common)?;
    let engine = build_engine(common, &model)?;
    let registry = Registry::with_defaults();
    let unit = Unit { bits: common.bits };
    let (g, trace) = registry.solver(&common.solver)?.solve(&engine)?;
    let d = engine.d_value(g)?;
    let opt = |v: Option<f64>| v.map_or("n/a".to_string(), |x| format!("{x:.3e}"));
    writeln!(out, "gamma1     {:.6}", g[0]).unwrap();
    writeln!(out, "gamma2     {:.6}", g[1]).unwrap();
    writeln!(out, "d          {}", unit.fixed(d, 6)).unwrap();
    writeln!(out, "solver     {}", trace.solver).unwrap();
    match trace.outer {
        Some(Boundary::AtZero) => writeln!(out, "outer      at 0").unwrap(),
        Some(Boundary::AtOne) => writeln!(out, "outer      at 1").unwrap(),
        Some(Boundary::Bracket { lo, hi, iterations }) => writeln!(
            out,
            "outer      [{lo:.9}, {hi:.9}] after {iterations} steps"
        )
        .unwrap(),
        None => {}
    }
    writeln!(out, "inner-iter {}", trace.inner_iterations).unwrap();
    writeln!(out, "evals      {}", trace.evaluations).unwrap();
    if let (Some(gg), Some(gv)) = (trace.grid_gamma, trace.grid_value) {
        writeln!(
            out,
            "grid       {:.6} {:.6}  d {}",
            gg[0],
            gg[1],
            unit.fixed(gv, 6)
        )
        .unwrap();
        writeln!(out, "override   {}", trace.grid_override).unwrap();
    }
    writeln!(out, "gap1       {}", opt(trace.balance_gaps[0])).unwrap();
    writeln!(out, "gap2       {}", opt(trace.balance_gaps[1])).unwrap();
    Ok(ExitCode::SUCCESS)
}

fn pair_header() -> String {
    let cols: Vec<String> = CLASS_PAIRS
        .iter()
        .map(|(a, b)| csv_field(&format!("{a},{b}")))
        .collect();
    format!("tau,{}", cols.join(","))
}

fn tables(common: &Common, out: &mut String) -> CliResult<ExitCode> {
    let model = load_model(common)?;
    let engine = build_engine(common, &model)?;
    let unit = Unit { bits: common.bits };
    let g = thresholds(&engine, common)?;
    let t = engine.cells_at(g)?;
    let lo = macjscc::bounds::lower_bound(&engine);
    let up = macjscc::bounds::upper_bound(&engine);

    writeln!(out, "# F at gamma {:.4} {:.4}", g[0], g[1]).unwrap();
    for (title, table) in [(None, &t), (Some("# F_L"), &lo.table)] {
        if let Some(title) = title {
            writeln!(out, "\n{title}").unwrap();
        }
        writeln!(out, "{}", pair_header()).unwrap();
        for tau in ErrorType::ALL {
            let row: Vec<String> = table
                .row(tau)
                .iter()
                .map(|c| unit.fixed(c.value, 4))
                .collect();
            writeln!(out, "{},{}", tau_label(tau), row.join(",")).unwrap();
        }
    }
    writeln!(out, "\n# F_U\ntau,value").unwrap();
    for c in &up.table {
        writeln!(
            out,
            "{},{}",
            tau_label(c.tau),
            unit.fixed(c.value.into(), 4)
        )
        .unwrap();
    }
    Ok(ExitCode::SUCCESS)
}

fn sweep_gamma(common: &Common, out: &mut String) -> CliResult<ExitCode> {
    let model = load_model(common)?;
    let engine = build_engine(common, &model)?;
    let unit = Unit { bits: common.bits };
    let n = common.grid.unwrap_or(64);
    if n < 2 {
        return Err(CliError::Input("--grid must be at least 2".into()));
    }
    let sweep = oracle::gamma_sweep(&engine, n)?;
    writeln!(out, "gamma1,gamma2,d").unwrap();
    for (i, &a) in sweep.axis.iter().enumerate() {
        for (j, &b) in sweep.axis.iter().enumerate() {
            let d = match sweep.at(i, j) {
                ExtReal::Finite(v) => ExtReal::Finite(unit.scale(v)),
                other => other,
            };
            writeln!(out, "{},{},{}", sig9(a.into()), sig9(b.into()), sig9(d)).unwrap();
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn sweep_rho(
    common: &Common,
    tau: TauArg,
    classes: &[usize],
    out: &mut String,
) -> CliResult<ExitCode> {
    let model = load_model(common)?;
    let engine = build_engine(common, &model)?;
    let unit = Unit { bits: common.bits };
    let class = |k: usize| {
        Class::from_number(k)
            .ok_or_else(|| CliError::Input(format!("class index must be 1 or 2, got {k}")))
    };
    let (i1, i2) = (class(classes[0])?, class(classes[1])?);
    let tau = match tau {
        TauArg::User1 => ErrorType::User1,
        TauArg::User2 => ErrorType::User2,
        TauArg::Both => ErrorType::Both,
    };
    let n = common.grid.unwrap_or(101);
    if n < 2 {
        return Err(CliError::Input("--grid must be at least 2".into()));
    }
    let g = thresholds(&engine, common)?;
    let obj = engine.objective(tau, i1, i2, g)?;
    writeln!(out, "rho,objective").unwrap();
    for k in 0..n {
        let rho = k as f64 / (n - 1) as f64;
        let v = match obj.eval(rho) {
            ExtReal::Finite(v) => ExtReal::Finite(unit.scale(v)),
            other => other,
        };
        writeln!(out, "{},{}", sig9(rho.into()), sig9(v)).unwrap();
    }
    Ok(ExitCode::SUCCESS)
}

struct Check {
    name: &'static str,
    ok: bool,
    detail: String,
}

fn verify(common: &Common, out: &mut String) -> CliResult<ExitCode> {
    let model = load_model(common)?;
    let engine = build_engine(common, &model)?;
    let g = thresholds(&engine, common)?;
    let mut checks = Vec::new();

    let table = engine.cells_at(g)?;
    let mut worst = 0.0f64;
    for c in table.cells() {
        if let ExtReal::Finite(v) = c.value {
            let obj = engine.objective(c.tau, c.i1, c.i2, g)?;
            let (_, gv) = oracle::grid_max_rho(|r| obj.eval(r).to_f64(), 10_001);
            worst = worst.max((v - gv).abs());
        }
    }
    checks.push(Check {
        name: "rho-maxima",
        ok: worst <= 1e-6,
        detail: format!("max |golden - grid| = {worst:.2e}"),
    });

    let n = common.grid.unwrap_or(64);
    let sweep = oracle::gamma_sweep(&engine, n.max(2))?;
    let d = table.d();
    let ok = match (sweep.max, d) {
        (ExtReal::Finite(s), ExtReal::Finite(e)) => s <= e + 1e-6,
        (s, e) => s <= e,
    };
    checks.push(Check {
        name: "gamma-grid",
        ok,
        detail: format!(
            "grid max {} at {:?}, exponent {}",
            sweep.max, sweep.argmax, d
        ),
    });

    let mut worst_fd = 0.0f64;
    let mut worst_lambda = 0.0f64;
    for user in User::BOTH {
        let src = model.source(user);
        for rho in [0.1, 0.5, 0.9] {
            let fd = oracle::fd_derivative(|r| oracle::direct_e_s(r, &src.probs), rho, 1e-5);
            worst_fd = worst_fd.max((fd - e_s_prime(rho, src)?).abs());
        }
        for k in 0..=20 {
            let rho = k as f64 / 20.0;
            for class in Class::ALL {
                let a = classexp::es_class(class, rho, src, g[user.index()])?;
                let b = oracle::es_class_by_lambda(class, rho, &src.probs, g[user.index()]);
                let gap = match (a, b) {
                    (ExtReal::Finite(x), ExtReal::Finite(y)) => (x - y).abs(),
                    (x, y) if x == y => 0.0,
                    _ => f64::INFINITY,
                };
                worst_lambda = worst_lambda.max(gap);
            }
            let direct = oracle::direct_e_s(rho, &src.probs);
            worst_lambda = worst_lambda.max((direct - e_s(rho, src)?).abs());
        }
    }
    checks.push(Check {
        name: "source-derivative",
        ok: worst_fd <= 1e-6,
        detail: format!("max |fd - analytic| = {worst_fd:.2e}"),
    });
    checks.push(Check {
        name: "class-exponents",
        ok: worst_lambda <= 1e-9,
        detail: format!("max |piecewise - tilt minimization| = {worst_lambda:.2e}"),
    });

    for c in &checks {
        let tag = if c.ok { "PASS" } else { "FAIL" };
        writeln!(out, "{tag} {:<18} {}", c.name, c.detail).unwrap();
    }
    Ok(if checks.iter().all(|c| c.ok) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}

fn validate(common: &Common, out: &mut String) -> CliResult<ExitCode> {
    let model = load_model(common)?;
    let violations = model.validate();
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(|v| format!("  - {v}")).collect();
        return Err(CliError::Input(format!(
            "model failed validation:\n{}",
            list.join("\n")
        )));
    }
    let ch = &model.channel;
    writeln!(
        out,
        "ok: sources {}+{} symbols, channel {}x{} -> {}",
        model.source1.len(),
        model.source2.len(),
        ch.n1,
        ch.n2,
        ch.ny
    )
    .unwrap();
    Ok(ExitCode::SUCCESS)
}
