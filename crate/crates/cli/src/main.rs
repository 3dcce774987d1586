mod args;
mod config;
mod output;

use std::fmt::Write as _;
use std::fs::File;
use std::io::BufReader;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Parser;
use edge_energy::report::{self, TraceRow};
use edge_energy::trace::{
    self, aggregate, extract_phases, rho_from_traces, synthesize_trace, SynthConfig,
};
use edge_energy::{
    compare, cost_curve, phase_timing, run_sweep, scenario_energy, AppKind, PhaseTiming,
    PowerProfile, TraceIteration,
};

use args::{Cli, Command, CostArgs, EvalArgs, Format, SweepArgs, TraceAnalyzeArgs, TraceSynthArgs};
use config::CostConfig;
use output::{aligned, emit, render};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let profile = config::load_profile(cli.profile.as_deref())?;
    let text = match &cli.command {
        Command::PowerTable => {
            let table = report::profile_table(&profile);
            render(&table, cli.format, || aligned(&table))
        }
        Command::Eval(args) => eval(args, &profile, cli.format)?,
        Command::Sweep(args) => sweep(args, &profile, cli.format)?,
        Command::Cost(args) => cost(args, &profile, cli.format)?,
        Command::TraceAnalyze(args) => trace_analyze(args, &profile, cli.format)?,
        Command::TraceSynth(args) => trace_synth(args)?,
    };
    emit(&text, cli.out.as_deref())
}

fn eval(args: &EvalArgs, profile: &PowerProfile, format: Format) -> Result<String> {
    let edge = config::scenario(args.config.as_deref(), &args.scenario)?;
    let mut runs = vec![("edge", edge.clone())];
    let mut rho = None;
    if let Some(rtt) = args.rtt_cloud {
        let cloud = edge.clone().with_rtt(rtt);
        rho = Some(compare(&edge, &cloud, profile)?.rho);
        runs.push(("cloud", cloud));
    }

    let mut columns = vec!["placement", "rtt_ms"];
    columns.extend(report::BREAKDOWN_COLUMNS);
    columns.push("rho");
    let mut table = report::Table::new(columns);
    let mut text = String::new();
    for (placement, scn) in &runs {
        let timing = phase_timing(scn, profile)?;
        let e = scenario_energy(scn, profile)?;
        let mut row = vec![
            report::Cell::Text(placement.to_string()),
            report::Cell::plain(scn.rtt),
        ];
        row.extend(report::breakdown_row(&timing, &e));
        row.push(rho.map_or(report::Cell::Null, report::ratio));
        table.push(row);

        let c = |cell: report::Cell| cell.text();
        let _ = writeln!(text, "{placement} (RTT = {} ms)", scn.rtt);
        let _ = writeln!(
            text,
            "  T_TX = {} ms  T_W = {} ms  T_RX = {} ms  T_Q = {} ms  promotions: tx {} rx {}",
            c(report::ms(timing.t_tx)),
            c(report::ms(timing.t_w)),
            c(report::ms(timing.t_rx)),
            c(report::ms(timing.t_q)),
            timing.prom_tx,
            timing.prom_rx
        );
        let _ = writeln!(
            text,
            "  E_TX = {} mJ  E_W = {} mJ  E_RX = {} mJ  E_Q = {} mJ  E_PROM = {} mJ",
            c(report::mj(e.e_tx)),
            c(report::mj(e.e_w)),
            c(report::mj(e.e_rx)),
            c(report::mj(e.e_q)),
            c(report::mj(e.e_prom_tx + e.e_prom_rx))
        );
        let _ = writeln!(text, "  E_I = {} mJ", c(report::mj(e.e_i)));
    }
    if let Some(rho) = rho {
        let _ = writeln!(text, "rho = {}", report::ratio(rho).text());
    }
    Ok(render(&table, format, || text))
}

fn sweep(args: &SweepArgs, profile: &PowerProfile, format: Format) -> Result<String> {
    let spec = config::sweep_spec(
        args.config.as_deref(),
        &args.scenario,
        args.rtt_cloud,
        &args.axes,
    )?;
    let grid = run_sweep(&spec, profile)?;
    let overruns = grid.cells.iter().filter(|c| c.rho().is_none()).count();
    if overruns > 0 {
        log::warn!(
            "{overruns} of {} cells overrun the period",
            grid.cells.len()
        );
    }
    let table = report::sweep_table(&grid);
    Ok(render(&table, format, || aligned(&table)))
}

fn cost(args: &CostArgs, profile: &PowerProfile, format: Format) -> Result<String> {
    let cfg = CostConfig::load(args)?;
    let specs = cfg.specs()?;
    let curves = specs
        .iter()
        .map(|s| cost_curve(s, profile))
        .collect::<Result<Vec<_>, _>>()?;
    let table = report::cost_table(&specs[0], &curves);
    Ok(render(&table, format, || {
        let mut text = String::new();
        for curve in &curves {
            let best = curve.best();
            let _ = writeln!(
                text,
                "alpha = {}: minimum cost {} at T_I = {} ms ({} mJ/h)",
                curve.alpha,
                report::Cell::fixed(best.c, 6).text(),
                best.t_i,
                report::mj(best.e_total).text()
            );
        }
        text
    }))
}

fn load_iterations(
    files: &[PathBuf],
    client: SocketAddr,
    kind: AppKind,
) -> Result<Vec<TraceIteration>> {
    files
        .iter()
        .enumerate()
        .map(|(index, path)| {
            let file =
                File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
            let events = trace::parse_events(BufReader::new(file), client)
                .with_context(|| format!("{}", path.display()))?;
            let mut it =
                extract_phases(&events, kind).with_context(|| format!("{}", path.display()))?;
            it.repetition_index = u32::try_from(index).context("too many captures")?;
            Ok(it)
        })
        .collect()
}

fn trace_analyze(
    args: &TraceAnalyzeArgs,
    profile: &PowerProfile,
    format: Format,
) -> Result<String> {
    let edge = load_iterations(&args.files, args.client, args.kind)?;
    let cloud = if args.cloud.is_empty() {
        None
    } else {
        Some(load_iterations(
            &args.cloud,
            args.cloud_client.unwrap_or(args.client),
            args.kind,
        )?)
    };
    let mut rows = Vec::new();
    for &t_i in &args.t_i {
        let agg = aggregate(&edge, t_i, profile)?;
        let p = agg.mean_phases;
        let timing = PhaseTiming::from_phases(p.t_tx, p.t_w, p.t_rx, t_i, profile)?;
        let rho = match &cloud {
            Some(cloud) => Some(rho_from_traces(&edge, cloud, t_i, profile)?),
            None => None,
        };
        rows.push(TraceRow {
            app_kind: args.kind,
            file_size: edge[0].file_size,
            t_i,
            concurrency: args.concurrency,
            timing,
            e_i: agg.total / edge.len() as f64,
            rho,
        });
    }
    let table = report::trace_table(&rows);
    Ok(render(&table, format, || aligned(&table)))
}

fn trace_synth(args: &TraceSynthArgs) -> Result<String> {
    let mut cfg = SynthConfig::new(
        args.kind,
        args.file_size,
        args.rtt,
        args.bottleneck,
        args.seed,
    );
    cfg.t_elab = args.t_elab;
    let synth = synthesize_trace(&cfg);
    let mut text = String::new();
    let _ = writeln!(
        text,
        "# client {} server {}",
        synth.flow.client, synth.flow.server
    );
    if let Some(s) = synth.schedule {
        let _ = writeln!(
            text,
            "# schedule t_tx_ms={} t_w_ms={} t_rx_ms={}",
            s.t_tx, s.t_w, s.t_rx
        );
    }
    let mut buf = Vec::new();
    trace::write_events(&synth.events, &mut buf)?;
    text.push_str(&String::from_utf8(buf)?);
    Ok(text)
}
