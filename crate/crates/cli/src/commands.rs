use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use oscbath_core::algebra::{FreqSymbol, ModeId};
use oscbath_core::effective::derive::{derive_effective, engine_frequency_shifts, engine_interference_coefficient, DerivationReport, ShiftVerdict};
use oscbath_core::effective::{
    build_channels, compute_rates, compute_shifts, effective_params, effective_params_for_branch, Branch,
    EffectiveParams, LindbladChannel, SystemSpec,
};
use oscbath_core::fit::{fit_decay, DecayFit};
use oscbath_core::lindblad::{evolve, steady_state, DensityMatrix, EvolveOptions, FockBasis, InvariantAudit, Liouvillian, SteadyOptions};
use oscbath_core::oracle::{normal_modes, run_bath, series_csv, BathDiscretization, BathRun, OracleSeries, QuadraticModel};

use crate::{to_json, CliError, Context};

fn declared_resonant(ctx: &Context) -> bool {
    ctx.config.resonance.is_resonant(FreqSymbol::Wc, FreqSymbol::Wr)
}

fn derivation(ctx: &Context) -> Result<DerivationReport, CliError> {
    derive_effective(&ctx.config.system, &ctx.config.resonance, &ctx.probe())
        .map_err(|e| CliError::Derivation(e.to_string()))
}

pub fn cmd_derive(ctx: &Context) -> Result<DerivationReport, CliError> {
    let report = derivation(ctx)?;
    ctx.write("derivation.json", &(report.to_json() + "\n"))?;
    ctx.write("derivation.txt", &report.render_text())?;
    let mut out = String::new();
    for c in &report.symbolic_checks {
        writeln!(out, "{:<36} {}", c.name, if c.matches { "match" } else { "differ" }).unwrap();
    }
    if let Some(v) = report.shift_assignment {
        writeln!(out, "shift assignment: {v:?}").unwrap();
    }
    ctx.echo(&out);
    Ok(report)
}

fn params(ctx: &Context) -> Result<EffectiveParams, CliError> {
    let spec = &ctx.config.system;
    let p = if declared_resonant(ctx) {
        effective_params_for_branch(spec, Branch::Resonant)?
    } else {
        effective_params(spec)?
    };
    Ok(p)
}

pub fn cmd_params(ctx: &Context) -> Result<EffectiveParams, CliError> {
    let p = params(ctx)?;
    ctx.write("params.json", &to_json(&p))?;
    let mut out = String::new();
    writeln!(out, "branch          {}", p.branch).unwrap();
    for (name, v) in [
        ("Pi_c", p.pi_c),
        ("Pi_r", p.pi_r),
        ("omega_c_tilde", p.omega_c_tilde),
        ("omega_r_tilde", p.omega_r_tilde),
        ("gamma_c_bar", p.gamma_c_bar),
        ("gamma_r_bar", p.gamma_r_bar),
        ("n_c_bar", p.n_c_bar),
        ("n_r_bar", p.n_r_bar),
    ] {
        writeln!(out, "{name:<15} {v:+.12e}").unwrap();
    }
    ctx.echo(&out);
    Ok(p)
}

#[derive(Clone, Debug, Serialize)]
pub struct Observables {
    pub tbar: f64,
    pub n_c: f64,
    pub n_r: f64,
    pub trace: f64,
    pub purity: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChannelFit {
    pub expected_rate: f64,
    /// Absent when the series is too flat to fit.
    pub fit: Option<DecayFit>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimulationSummary {
    pub channels: Vec<LindbladChannel>,
    pub initial: Observables,
    #[serde(rename = "final")]
    pub last: Observables,
    /// Stationary occupations the channels drive towards.
    pub expected_steady: [f64; 2],
    /// Occupations of the integrated stationary state, when requested.
    pub steady_state: Option<[f64; 2]>,
    pub decay_c: ChannelFit,
    pub decay_r: ChannelFit,
    pub audit: InvariantAudit,
}

fn channels(ctx: &Context) -> Result<[LindbladChannel; 2], CliError> {
    match ctx.config.simulation.rates {
        Some(r) => Ok([
            LindbladChannel::new(ModeId::c(), r.gamma_c_bar, r.n_c_bar),
            LindbladChannel::new(ModeId::r(), r.gamma_r_bar, r.n_r_bar),
        ]),
        None => {
            if declared_resonant(ctx) {
                return Err(CliError::Config(
                    "the kinetic equation covers the non-resonant branch only; supply simulation.rates".into(),
                ));
            }
            Ok(build_channels(&ctx.config.system)?)
        }
    }
}

fn fit_channel(t: &[f64], x: &[f64], expected_rate: f64) -> ChannelFit {
    ChannelFit {
        expected_rate,
        fit: fit_decay(t, x).ok(),
    }
}

pub fn cmd_simulate(ctx: &Context) -> Result<SimulationSummary, CliError> {
    let sim = &ctx.config.simulation;
    let chans = channels(ctx)?;
    let basis = FockBasis::new(sim.dims[0], sim.dims[1])?;
    let l = Liouvillian::new(basis, &chans)?;
    let rho0 = DensityMatrix::fock(basis, sim.initial.n_c, sim.initial.n_r);
    let opts = EvolveOptions {
        dt: sim.dt,
        t_final: sim.t_final,
        sample_every: sim.sample_every,
        eigen_check_every: sim.eigen_check_every,
    };
    let tr = evolve(&rho0, &l, &opts)?;
    let steady = match sim.steady {
        Some(s) => {
            let opts = SteadyOptions {
                dt: sim.dt,
                tol: s.tol,
                max_steps: s.max_steps,
                check_every: s.check_every,
            };
            let st = steady_state(&tr.final_state, &l, &opts)?;
            let (a, b) = st.occupations();
            Some([a, b])
        }
        None => None,
    };
    let ser = &tr.series;
    let obs = |k: usize| Observables {
        tbar: ser.tbar[k],
        n_c: ser.n_c[k],
        n_r: ser.n_r[k],
        trace: ser.trace[k],
        purity: ser.purity[k],
    };
    let summary = SimulationSummary {
        channels: chans.to_vec(),
        initial: obs(0),
        last: obs(ser.len() - 1),
        expected_steady: [chans[0].occupation, chans[1].occupation],
        steady_state: steady,
        decay_c: fit_channel(&ser.tbar, &ser.n_c, chans[0].rate),
        decay_r: fit_channel(&ser.tbar, &ser.n_r, chans[1].rate),
        audit: tr.audit,
    };
    ctx.write("series.csv", &ser.to_csv())?;
    ctx.write("summary.json", &to_json(&summary))?;
    ctx.echo(&format!(
        "t = {}: <n_c> = {:.8}, <n_r> = {:.8}; max trace drift {:.2e}, min eigenvalue {}\n",
        summary.last.tbar,
        summary.last.n_c,
        summary.last.n_r,
        summary.audit.max_trace_drift,
        summary.audit.min_eigenvalue.map_or("unchecked".to_owned(), |e| format!("{e:.2e}"))
    ));
    Ok(summary)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub gamma_c_target: f64,
    /// Fitted decay rate of `c` with `g = 0` and `c` excited.
    pub gamma_c_fit: Option<f64>,
    /// `|ln(n_r(T)/n_r(0))|/T` in the same run, where `r` is decoupled.
    pub noise_floor: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunFit {
    pub g: f64,
    /// Zero unless a decay was resolved above the noise floor and the fit residual.
    pub gamma_r: f64,
    pub decay_detected: bool,
    pub amplitude: Option<f64>,
    pub asymptote: Option<f64>,
    pub residual_norm: Option<f64>,
    pub n_c_final: f64,
    pub n_r_final: f64,
    /// Kinetic-equation rate `γ̄_r·ω_c` for the same `g` and bath.
    pub gamma_r_effective: f64,
    /// `gamma_r / gamma_r_effective`, absent when either side vanishes.
    pub prefactor_ratio: Option<f64>,
    /// Golden-rule rate `κ²Γ_c` from the engine's `r⁺a_ω` coefficient at
    /// `ω = ω_r`, where `κ` is that coefficient per unit bath coupling.
    pub gamma_r_engine: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub g_low: f64,
    pub g_high: f64,
    pub ratio: f64,
    /// `(g_high/g_low)²`.
    pub expected: f64,
    pub within_10_percent: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleFit {
    pub n_modes: usize,
    pub band: [f64; 2],
    pub dt: f64,
    pub t_final: f64,
    pub bath_coupling: f64,
    pub calibration: Calibration,
    pub runs: Vec<RunFit>,
    pub scaling: Vec<ScalingRow>,
}

fn oracle_gamma(ctx: &Context) -> Result<f64, CliError> {
    match ctx.config.oracle.gamma_target {
        Some(g) => Ok(g),
        None => Ok(compute_rates(&ctx.config.system)?.gamma_c_bar * ctx.config.system.omega_c),
    }
}

fn base_run(ctx: &Context, g: f64, gamma: f64) -> BathRun {
    let o = &ctx.config.oracle;
    let s = &ctx.config.system;
    let mut run = BathRun::new(s.omega_c, s.omega_r, g / s.hbar, gamma);
    run.n_modes = o.n_modes;
    if let Some([lo, hi]) = o.band {
        run.band = (lo, hi);
    }
    run.profile = o.profile.clone();
    run.n_c0 = o.n_c0;
    run.n_r0 = o.n_r0;
    run.dt = o.dt;
    run.t_final = o.t_final;
    run
}

/// Coupling constant reproducing `gamma` as the effective decay rate of `c`.
fn equivalent_spec(spec: &SystemSpec, g: f64, gamma: f64) -> SystemSpec {
    let gamma_c = (gamma * spec.hbar * spec.omega_c / (2.0 * std::f64::consts::PI * spec.rate_convention)).sqrt();
    SystemSpec {
        g,
        gamma_c,
        ..spec.clone()
    }
}

fn noise_floor(s: &OracleSeries) -> f64 {
    let (first, last) = (s.n_r[0], *s.n_r.last().expect("nonempty series"));
    let t = *s.t.last().expect("nonempty series");
    if first > 0.0 && last > 0.0 && t > 0.0 {
        (last / first).ln().abs() / t
    } else {
        0.0
    }
}

/// A fitted decay counts when its rate clears ten noise floors and the drop
/// it describes over the run is ten times the rms residual.
fn decay_resolved(f: &DecayFit, t: &[f64], floor: f64) -> bool {
    let span = t[t.len() - 1] - t[0];
    let drop = f.amplitude.abs() * (1.0 - (-f.rate * span).exp());
    let rms = f.residual_norm / (t.len() as f64).sqrt();
    f.rate > 10.0 * floor && f.rate > 0.0 && drop > 10.0 * rms
}

fn run_oracle(ctx: &Context) -> Result<(OracleFit, Vec<OracleSeries>), CliError> {
    let spec = &ctx.config.system;
    let gamma = oracle_gamma(ctx)?;
    let mut sweep = ctx.config.oracle.g_sweep.clone();
    sweep.sort_by(f64::total_cmp);
    sweep.dedup();

    let mut cal = base_run(ctx, 0.0, gamma);
    cal.n_c0 = 1.0;
    cal.n_r0 = 1.0;
    let disc: BathDiscretization = cal.discretization()?;
    let cal_series = run_bath(&cal)?;
    let floor = noise_floor(&cal_series);
    let calibration = Calibration {
        gamma_c_target: gamma,
        gamma_c_fit: if gamma > 0.0 {
            fit_decay(&cal_series.t, &cal_series.n_c).ok().map(|f| f.rate)
        } else {
            None
        },
        noise_floor: floor,
    };

    let mut runs = Vec::new();
    let mut series = Vec::new();
    for &g in &sweep {
        let s = run_bath(&base_run(ctx, g, gamma))?;
        let fit = fit_decay(&s.t, &s.n_r).ok();
        let detected = fit.is_some_and(|f| decay_resolved(&f, &s.t, floor));
        let gamma_r = if detected { fit.map_or(0.0, |f| f.rate) } else { 0.0 };
        let effective = compute_rates(&equivalent_spec(spec, g, gamma))?.gamma_r_bar * spec.omega_c;
        let unit_bath = SystemSpec {
            g,
            gamma_c: 1.0,
            ..spec.clone()
        };
        let kappa = if g == 0.0 {
            0.0
        } else {
            engine_interference_coefficient(&unit_bath, spec.omega_r).map_err(|e| CliError::Derivation(e.to_string()))?
        };
        runs.push(RunFit {
            g,
            gamma_r,
            decay_detected: detected,
            amplitude: fit.map(|f| f.amplitude),
            asymptote: fit.map(|f| f.asymptote),
            residual_norm: fit.map(|f| f.residual_norm),
            n_c_final: *s.n_c.last().expect("nonempty series"),
            n_r_final: *s.n_r.last().expect("nonempty series"),
            gamma_r_effective: effective,
            prefactor_ratio: (gamma_r > 0.0 && effective > 0.0).then(|| gamma_r / effective),
            gamma_r_engine: kappa * kappa * gamma,
        });
        series.push(s);
    }

    let scaling = runs
        .windows(2)
        .filter(|w| w[0].decay_detected && w[1].decay_detected)
        .map(|w| {
            let ratio = w[1].gamma_r / w[0].gamma_r;
            let expected = (w[1].g / w[0].g).powi(2);
            ScalingRow {
                g_low: w[0].g,
                g_high: w[1].g,
                ratio,
                expected,
                within_10_percent: ((ratio - expected) / expected).abs() <= 0.1,
            }
        })
        .collect();

    let fit = OracleFit {
        n_modes: disc.n_modes,
        band: [disc.omega_min, disc.omega_max],
        dt: cal.dt,
        t_final: *cal_series.t.last().expect("nonempty series"),
        bath_coupling: disc.coupling,
        calibration,
        runs,
        scaling,
    };
    Ok((fit, series))
}

pub fn cmd_oracle(ctx: &Context) -> Result<OracleFit, CliError> {
    let (fit, series) = run_oracle(ctx)?;
    ctx.write("oracle_series.csv", &series_csv(&series))?;
    ctx.write("oracle_fit.json", &to_json(&fit))?;
    let mut out = String::new();
    writeln!(
        out,
        "bath: {} modes on [{:.4}, {:.4}], Gamma_c target {:.4e}, fitted {}",
        fit.n_modes,
        fit.band[0],
        fit.band[1],
        fit.calibration.gamma_c_target,
        fit.calibration.gamma_c_fit.map_or("-".to_owned(), |g| format!("{g:.4e}"))
    )
    .unwrap();
    for r in &fit.runs {
        writeln!(
            out,
            "g = {:<8} Gamma_r = {:.4e}  engine golden rule {:.4e}  asymptote {}",
            r.g,
            r.gamma_r,
            r.gamma_r_engine,
            r.asymptote.map_or("-".to_owned(), |a| format!("{a:.4}"))
        )
        .unwrap();
    }
    for s in &fit.scaling {
        writeln!(out, "Gamma_r({})/Gamma_r({}) = {:.4} (expected {:.4})", s.g_high, s.g_low, s.ratio, s.expected).unwrap();
    }
    ctx.echo(&out);
    Ok(fit)
}

#[derive(Clone, Debug, Serialize)]
pub struct ShiftRow {
    pub g: f64,
    /// Normal-mode frequencies of the closed two-oscillator model, in the
    /// order (mode continuing `c`, mode continuing `r`).
    pub exact: [f64; 2],
    pub engine: [f64; 2],
    /// `ω − Π/ħ` with the printed shift values.
    pub printed: [f64; 2],
    pub engine_residual: [f64; 2],
    pub printed_residual: [f64; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct RateRow {
    pub g: f64,
    pub oracle: f64,
    pub effective: f64,
    pub prefactor_ratio: Option<f64>,
    pub engine: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionRow {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompareReport {
    pub branch: Branch,
    pub coefficients: Vec<oscbath_core::effective::derive::CoefficientRow>,
    pub symbolic_checks: Vec<oscbath_core::effective::derive::SymbolicCheck>,
    pub shift_assignment: Option<ShiftVerdict>,
    pub shifts: Vec<ShiftRow>,
    pub rates: Vec<RateRow>,
    pub criteria: Vec<CriterionRow>,
}

fn shift_row(spec: &SystemSpec, g: f64) -> Result<ShiftRow, CliError> {
    let s = SystemSpec { g, ..spec.clone() };
    let (sc, sr) = engine_frequency_shifts(&s).map_err(|e| CliError::Derivation(e.to_string()))?;
    let (pc, pr) = compute_shifts(&s)?.pair();
    let w = normal_modes(&QuadraticModel::two_mode(s.omega_c, s.omega_r, g / s.hbar)?);
    let exact = if s.omega_c >= s.omega_r { [w[1], w[0]] } else { [w[0], w[1]] };
    let engine = [s.omega_c + sc, s.omega_r + sr];
    let printed = [s.omega_c - pc / s.hbar, s.omega_r - pr / s.hbar];
    Ok(ShiftRow {
        g,
        exact,
        engine,
        printed,
        engine_residual: [(exact[0] - engine[0]).abs(), (exact[1] - engine[1]).abs()],
        printed_residual: [(exact[0] - printed[0]).abs(), (exact[1] - printed[1]).abs()],
    })
}

fn load_oracle_fit(ctx: &Context) -> Result<OracleFit, CliError> {
    let path = ctx.out.join("oracle_fit.json");
    let text = std::fs::read_to_string(&path)
        .map_err(|e| CliError::Config(format!("missing input {}: {e}; run `oscbath oracle` first", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("malformed {}: {e}", path.display())))
}

/// Halving-`g` ratios of the engine residuals for pairs `(g, 2g)` in the sweep.
fn halving_ratios(rows: &[ShiftRow]) -> Vec<(f64, [f64; 2])> {
    let mut out = Vec::new();
    for lo in rows {
        if let Some(hi) = rows.iter().find(|h| lo.g > 0.0 && (h.g - 2.0 * lo.g).abs() <= 1e-12 * h.g) {
            out.push((
                lo.g,
                [
                    hi.engine_residual[0] / lo.engine_residual[0],
                    hi.engine_residual[1] / lo.engine_residual[1],
                ],
            ));
        }
    }
    out
}

pub fn cmd_compare(ctx: &Context, from_artifacts: bool) -> Result<CompareReport, CliError> {
    let report = cmd_derive(ctx)?;
    let p = cmd_params(ctx)?;
    let mut criteria = Vec::new();
    let check = |name: &str| report.symbolic_checks.iter().find(|c| c.name == name).map(|c| c.matches);
    let spec = &ctx.config.system;

    let mut shifts = Vec::new();
    let mut rates = Vec::new();
    if p.branch == Branch::Resonant {
        let all = !report.symbolic_checks.is_empty() && report.symbolic_checks.iter().all(|c| c.matches);
        criteria.push(CriterionRow {
            name: "resonant generator and shift reproduced".into(),
            pass: all && report.coefficients.iter().all(|r| r.agree),
            detail: format!("{} symbolic checks", report.symbolic_checks.len()),
        });
    } else {
        if let Some(m) = check("S(1,0)") {
            criteria.push(CriterionRow {
                name: "first-order generator reproduced".into(),
                pass: m,
                detail: "four-term S(1,0)".into(),
            });
        }
        if let Some(row) = report.coefficients.iter().find(|r| r.quantity == "V2_cr scalar") {
            criteria.push(CriterionRow {
                name: "second-order scalar term reproduced".into(),
                pass: row.agree,
                detail: format!("engine {:+.15e}, printed {:+.15e}", row.engine, row.printed),
            });
        }
        if !report.interference_grid.is_empty() {
            criteria.push(CriterionRow {
                name: "interference channel tabulated".into(),
                pass: report.regions.iter().any(|t| t.operator == "V2_r" && t.region == "wr"),
                detail: format!("{} grid points", report.interference_grid.len()),
            });
        }

        for &g in &ctx.config.oracle.g_sweep {
            shifts.push(shift_row(spec, g)?);
        }
        shifts.sort_by(|a, b| a.g.total_cmp(&b.g));
        for (g, r) in halving_ratios(&shifts) {
            let ok = r.iter().all(|x| ((x - 16.0) / 16.0).abs() <= 0.2);
            criteria.push(CriterionRow {
                name: format!("engine shifts leave an O(g^4) residual (g = {g}, {})", 2.0 * g),
                pass: ok,
                detail: format!("residual ratios {:.4}, {:.4} (16 +/- 20%)", r[0], r[1]),
            });
        }

        let fit = if from_artifacts {
            load_oracle_fit(ctx)?
        } else {
            cmd_oracle(ctx)?
        };
        for r in &fit.runs {
            rates.push(RateRow {
                g: r.g,
                oracle: r.gamma_r,
                effective: r.gamma_r_effective,
                prefactor_ratio: r.prefactor_ratio,
                engine: r.gamma_r_engine,
            });
        }
        for s in &fit.scaling {
            criteria.push(CriterionRow {
                name: format!("Gamma_r scales as g^2 (g = {}, {})", s.g_low, s.g_high),
                pass: s.within_10_percent,
                detail: format!("ratio {:.4}, expected {:.4}", s.ratio, s.expected),
            });
        }
        let coupled: Vec<&RunFit> = fit.runs.iter().filter(|r| r.g != 0.0).collect();
        if !coupled.is_empty() && fit.calibration.gamma_c_target > 0.0 {
            criteria.push(CriterionRow {
                name: "indirect relaxation of r above the noise floor".into(),
                pass: coupled.iter().all(|r| r.decay_detected),
                detail: format!("noise floor {:.3e}", fit.calibration.noise_floor),
            });
        }
    }

    let cmp = CompareReport {
        branch: p.branch,
        coefficients: report.coefficients.clone(),
        symbolic_checks: report.symbolic_checks.clone(),
        shift_assignment: report.shift_assignment,
        shifts,
        rates,
        criteria,
    };
    ctx.write("compare.json", &to_json(&cmp))?;
    let mut out = String::new();
    for c in &cmp.criteria {
        writeln!(out, "{} {} ({})", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail).unwrap();
    }
    ctx.echo(&out);
    Ok(cmp)
}
