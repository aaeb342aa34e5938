use std::fs;

use anyhow::{bail, Context, Result};
use clap::Parser;

mod cli;

use cli::{env_seed, BenchArgs, Cli, Command, FitArgs, SampleArgs};

fn main() {
    let parsed = Cli::parse();
    if let Err(err) = run(parsed) {
        eprintln!("error: {err:#}");
        std::process::exit(1);
    }
}

fn run(parsed: Cli) -> Result<()> {
    match parsed.command {
        Command::Fit(args) => fit(&args),
        Command::Sample(args) => sample(&args),
        Command::Eval(args) => {
            let outcome = sde::run_eval(&args.request())?;
            print!("{}", outcome.table);
            if let Some(summary) = &outcome.summary {
                println!();
                print!("{}", sde::evaluate::render_summary(summary));
                if !summary.passed {
                    bail!("validity checks failed");
                }
            }
            Ok(())
        }
        Command::Bench(args) => bench(&args),
        Command::CountSpace(args) => {
            print!("{}", sde::run_count_space(&args.request())?);
            Ok(())
        }
    }
}

fn fit(args: &FitArgs) -> Result<()> {
    let env = env_seed();
    let cfg = args.run_config(env.as_deref())?;
    let report = sde::run_fit(&cfg)?;
    println!("family: {}", report.family);
    for (name, value) in &report.parameters {
        println!("  {name} = {value}");
    }
    println!("loss: {:.6e} (relaxation level {})", report.loss, report.relaxation_level);
    println!("expression: {}", report.expression);
    println!("report: {}", args.out.display());
    Ok(())
}

fn sample(args: &SampleArgs) -> Result<()> {
    let spec = targets::parse_spec(&args.family).context("parsing --family")?;
    let seed = match env_seed() {
        Some(raw) => raw
            .trim()
            .parse()
            .with_context(|| format!("SDE_SEED is set but not a valid u64: `{raw}`"))?,
        None => args.seed,
    };
    let counts = targets::sample(&spec, args.samples, seed);
    fs::write(&args.out, counts.to_csv())
        .with_context(|| format!("writing {}", args.out.display()))?;
    println!(
        "sampled {} draws from {} (seed {seed}) into {}",
        args.samples,
        targets::format_spec(&spec),
        args.out.display()
    );
    Ok(())
}

fn bench(args: &BenchArgs) -> Result<()> {
    let env = env_seed();
    let settings = args.settings(env.as_deref())?;
    let report = sde::run_bench(&settings, Some(&args.out))?;
    for row in &report.rows {
        match &row.error {
            Some(err) => println!("{}: FAILED ({err})", row.family),
            None => println!(
                "{}: {} in {:.1}s (eval mse {})",
                row.family,
                row.inferred_family.as_deref().unwrap_or("unknown"),
                row.wall_time_s,
                row.eval_mse.map_or("n/a".into(), |m| format!("{m:.3e}")),
            ),
        }
    }
    println!("report: {}", args.out.display());
    Ok(())
}
