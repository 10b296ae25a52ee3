use std::io::Write;

use ana_dof::channel_model::{sample_states, RealizationDump};
use ana_dof::dof_analysis::{rank_trials, MiOptions, RankTrials};
use ana_dof::entropy_oracle::{random_lemma_reports, DiscreteSource, JointDistribution, LemmaReport, LemmaSweep};
use ana_dof::sdof_theory::{
    bc_dof_region_delayed, bcc_region_delayed, bcc_region_perfect, sdof_wiretap, sweep, SweepRow,
};
use ana_dof::{
    monte_carlo_sdof, sample_scheme, AntennaConfig, CsitMode, MonteCarloConfig, Rational, SchemeKind, SdofRegion, Seed,
    SimulationRecord, SnrGrid,
};
use serde::Serialize;

use crate::{CfgArgs, Cli, CliError, Command, Format, Outcome, RegionKind};

pub(crate) fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Sdof { cfg, csit } => cmd_sdof(cfg_of(cfg)?, *csit, cli.format, out),
        Command::Sweep {
            na,
            nb,
            m_min,
            m_max,
            csit,
        } => cmd_sweep(*na, *nb, *m_min, *m_max, csit, cli.format, out),
        Command::Region { cfg, which } => cmd_region(cfg_of(cfg)?, *which, cli.format, out),
        Command::Simulate {
            kind,
            cfg,
            trials,
            grid_db,
            seed,
            tol,
            no_artificial_noise,
        } => {
            let mc = MonteCarloConfig {
                trials: *trials,
                grid: SnrGrid::from_db(grid_db)?,
                seed: Seed(seed.seed),
                options: MiOptions {
                    artificial_noise: !no_artificial_noise,
                },
                tol: *tol,
            };
            cmd_simulate(*kind, cfg_of(cfg)?, &mc, cli.format, out)
        }
        Command::Ranks {
            kind,
            cfg,
            trials,
            seed,
            tol,
        } => {
            let report = rank_trials(*kind, cfg_of(cfg)?, *trials, Seed(seed.seed), *tol)?;
            write_ranks(&report, cli.format, out)?;
            Ok(Outcome::from_pass(report.pass))
        }
        Command::VerifyLemma {
            count,
            l_max,
            q,
            seed,
            tol,
            inject_non_exchangeable,
        } => cmd_verify_lemma(
            *count,
            *l_max,
            *q,
            Seed(seed.seed),
            *tol,
            *inject_non_exchangeable,
            cli.format,
            out,
        ),
        Command::DumpChannel { cfg, slots, seed } => {
            let r = sample_states(cfg_of(cfg)?, *slots, Seed(seed.seed))?;
            write_channel(seed.seed, &r.to_dump(), cli.format, out)?;
            Ok(Outcome::Pass)
        }
        Command::Structure { kind, cfg, seed } => {
            let s = sample_scheme(*kind, cfg_of(cfg)?, Seed(seed.seed))?.structure();
            match cli.format.unwrap_or(Format::Json) {
                Format::Json => write_json(out, &s)?,
                Format::Csv => {
                    let mut w = csv_writer(out);
                    w.write_record(["element", "name", "rows", "cols"])?;
                    for p in &s.precoders {
                        w.serialize(("precoder", &p.name, p.shape[0], p.shape[1]))?;
                    }
                    w.serialize(("channel", "legit", s.legit.shape[0], s.legit.shape[1]))?;
                    w.serialize(("channel", "eaves", s.eaves.shape[0], s.eaves.shape[1]))?;
                    w.flush()?;
                }
            }
            Ok(Outcome::Pass)
        }
    }
}

fn cfg_of(c: &CfgArgs) -> Result<AntennaConfig, CliError> {
    Ok(AntennaConfig::new(c.m, c.na, c.nb)?)
}

fn csv_writer(out: &mut dyn Write) -> csv::Writer<&mut dyn Write> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    out.write_all(b"\n")?;
    Ok(())
}

fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `"p/q ≈ x.xxxxxx"`, or just the integer when the denominator is one.
pub fn describe_rational(r: Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{r} ≈ {:.6}", to_f64(r))
    }
}

#[derive(Serialize)]
struct SdofJson {
    cfg: AntennaConfig,
    mode: &'static str,
    exact: String,
    value: f64,
}

fn cmd_sdof(
    cfg: AntennaConfig,
    mode: CsitMode,
    format: Option<Format>,
    out: &mut dyn Write,
) -> Result<Outcome, CliError> {
    let r = sdof_wiretap(cfg, mode)?;
    match format {
        None => writeln!(out, "{}", describe_rational(r))?,
        Some(Format::Json) => write_json(
            out,
            &SdofJson {
                cfg,
                mode: mode.name(),
                exact: r.to_string(),
                value: to_f64(r),
            },
        )?,
        Some(Format::Csv) => {
            let mut w = csv_writer(out);
            w.write_record(["m", "na", "nb", "mode", "sdof_num", "sdof_den", "sdof_float"])?;
            w.serialize((
                cfg.m,
                cfg.na,
                cfg.nb,
                mode.name(),
                r.numer(),
                r.denom(),
                format!("{:.6}", to_f64(r)),
            ))?;
            w.flush()?;
        }
    }
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct SweepRowJson {
    m: u32,
    mode: &'static str,
    exact: Option<String>,
    value: Option<f64>,
}

#[derive(Serialize)]
struct SweepJson {
    na: u32,
    nb: u32,
    rows: Vec<SweepRowJson>,
}

fn cmd_sweep(
    na: u32,
    nb: u32,
    m_min: u32,
    m_max: u32,
    modes: &[CsitMode],
    format: Option<Format>,
    out: &mut dyn Write,
) -> Result<Outcome, CliError> {
    if m_min == 0 || m_min > m_max {
        return Err(CliError::Usage(format!(
            "need 1 <= m-min <= m-max, got {m_min}..{m_max}"
        )));
    }
    let modes = if modes.is_empty() { &CsitMode::ALL[..] } else { modes };
    let rows: Vec<SweepRow> = sweep(na, nb, m_min..=m_max, modes)?;
    match format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["m", "mode", "sdof_num", "sdof_den", "sdof_float"])?;
            for row in &rows {
                let m = row.m.to_string();
                match row.value {
                    Some(v) => w.write_record([
                        m,
                        row.mode.name().to_string(),
                        v.numer().to_string(),
                        v.denom().to_string(),
                        format!("{:.6}", to_f64(v)),
                    ])?,
                    None => w.write_record([m.as_str(), row.mode.name(), "", "", ""])?,
                }
            }
            w.flush()?;
        }
        Format::Json => write_json(
            out,
            &SweepJson {
                na,
                nb,
                rows: rows
                    .iter()
                    .map(|r| SweepRowJson {
                        m: r.m,
                        mode: r.mode.name(),
                        exact: r.value.map(|v| v.to_string()),
                        value: r.value.map(to_f64),
                    })
                    .collect(),
            },
        )?,
    }
    Ok(Outcome::Pass)
}

#[derive(Serialize)]
struct HalfPlaneJson {
    a: String,
    b: String,
    c: String,
}

#[derive(Serialize)]
struct VertexJson {
    d_a: String,
    d_b: String,
}

#[derive(Serialize)]
struct RegionJson {
    which: &'static str,
    cfg: AntennaConfig,
    halfplanes: Vec<HalfPlaneJson>,
    vertices: Vec<VertexJson>,
}

fn cmd_region(
    cfg: AntennaConfig,
    which: RegionKind,
    format: Option<Format>,
    out: &mut dyn Write,
) -> Result<Outcome, CliError> {
    let region: SdofRegion = match which {
        RegionKind::SdofDelayed => bcc_region_delayed(cfg),
        RegionKind::SdofPerfect => bcc_region_perfect(cfg)?,
        RegionKind::DofDelayed => bc_dof_region_delayed(cfg),
    };
    match format.unwrap_or(Format::Json) {
        Format::Json => write_json(
            out,
            &RegionJson {
                which: which.name(),
                cfg,
                halfplanes: region
                    .halfplanes()
                    .iter()
                    .map(|h| HalfPlaneJson {
                        a: h.a.to_string(),
                        b: h.b.to_string(),
                        c: h.c.to_string(),
                    })
                    .collect(),
                vertices: region
                    .vertices()
                    .iter()
                    .map(|(a, b)| VertexJson {
                        d_a: a.to_string(),
                        d_b: b.to_string(),
                    })
                    .collect(),
            },
        )?,
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["element", "index", "a", "b", "c", "d_a", "d_b"])?;
            for (i, h) in region.halfplanes().iter().enumerate() {
                let (a, b, c) = (h.a.to_string(), h.b.to_string(), h.c.to_string());
                w.write_record(["halfplane", &i.to_string(), &a, &b, &c, "", ""])?;
            }
            for (i, (da, db)) in region.vertices().iter().enumerate() {
                let (da, db) = (da.to_string(), db.to_string());
                w.write_record(["vertex", &i.to_string(), "", "", "", &da, &db])?;
            }
            w.flush()?;
        }
    }
    Ok(Outcome::Pass)
}

fn cmd_simulate(
    kind: SchemeKind,
    cfg: AntennaConfig,
    mc: &MonteCarloConfig,
    format: Option<Format>,
    out: &mut dyn Write,
) -> Result<Outcome, CliError> {
    let record: SimulationRecord = monte_carlo_sdof(kind, cfg, mc)?;
    match format.unwrap_or(Format::Json) {
        Format::Json => write_json(out, &record)?,
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record([
                "message",
                "slope_mean",
                "slope_ci95",
                "leakage_mean",
                "leakage_ci95",
                "theory_exact",
                "theory_value",
                "pass",
            ])?;
            for ((s, l), t) in record.slopes.iter().zip(&record.leakage).zip(&record.theory_value) {
                let pass = (s.mean - t.value).abs() <= record.tol && l.mean.abs() <= record.tol;
                w.serialize((
                    s.message.name(),
                    s.mean,
                    s.ci95,
                    l.mean,
                    l.ci95,
                    &t.exact,
                    t.value,
                    pass,
                ))?;
            }
            w.flush()?;
        }
    }
    Ok(Outcome::from_pass(record.pass))
}

fn write_ranks(report: &RankTrials, format: Option<Format>, out: &mut dyn Write) -> Result<(), CliError> {
    match format.unwrap_or(Format::Json) {
        Format::Json => write_json(out, report),
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["check", "name", "expected", "passed_trials", "trials"])?;
            for i in &report.identities {
                w.serialize(("rank", &i.name, i.expected, i.passed, report.trials))?;
            }
            for d in &report.decodable {
                let name = format!("decodable({})", d.message.name());
                w.serialize(("decode", name, "", d.decodable, report.trials))?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

/// Two bits where the second is constant: `h(X1) != h(X2)`.
fn non_exchangeable_source() -> DiscreteSource {
    JointDistribution::from_fn(2, 2, |x| if x[1] == 0 { 0.5 } else { 0.0 })
        .expect("valid pmf")
        .into()
}

#[derive(Serialize)]
struct LemmaJson {
    l_max: usize,
    q: usize,
    seed: u64,
    tol: f64,
    #[serde(flatten)]
    sweep: LemmaSweep,
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify_lemma(
    count: usize,
    l_max: usize,
    q: usize,
    seed: Seed,
    tol: f64,
    inject: bool,
    format: Option<Format>,
    out: &mut dyn Write,
) -> Result<Outcome, CliError> {
    let mut reports: Vec<LemmaReport> = random_lemma_reports(count, l_max, q, seed, tol)?;
    if inject {
        reports.push(ana_dof::verify_essential_lemma(&non_exchangeable_source(), tol));
    }
    let rows: Vec<_> = reports
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let joint = r.source_spec.joint();
            (
                i,
                joint.len(),
                joint.alphabet(),
                r.status,
                r.worst_margin_ess1,
                r.worst_margin_ess2,
            )
        })
        .collect();
    let sweep = LemmaSweep::from_reports(reports);
    let pass = sweep.pass;
    match format.unwrap_or(Format::Json) {
        Format::Json => write_json(
            out,
            &LemmaJson {
                l_max,
                q,
                seed: seed.0,
                tol,
                sweep,
            },
        )?,
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["index", "l", "q", "status", "worst_margin_ess1", "worst_margin_ess2"])?;
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
    }
    Ok(Outcome::from_pass(pass))
}

#[derive(Serialize)]
struct ChannelJson<'a> {
    seed: u64,
    #[serde(flatten)]
    realization: &'a RealizationDump,
}

fn write_channel(
    seed: u64,
    dump: &RealizationDump,
    format: Option<Format>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    match format.unwrap_or(Format::Json) {
        Format::Json => write_json(
            out,
            &ChannelJson {
                seed,
                realization: dump,
            },
        ),
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["slot", "matrix", "row", "col", "re", "im"])?;
            for (t, slot) in dump.slots.iter().enumerate() {
                for (name, mat) in [("h", &slot.h), ("g", &slot.g)] {
                    for (i, row) in mat.iter().enumerate() {
                        for (j, [re, im]) in row.iter().enumerate() {
                            w.serialize((t, name, i, j, re, im))?;
                        }
                    }
                }
            }
            w.flush()?;
            Ok(())
        }
    }
}
