use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use kscatter::algebra::{Levels, Mode};
use kscatter::euler::{kronecker_euler_with, Framing, Route};
use kscatter::quiver::{build_covering_fragment, RootKind};
use kscatter::sorting::{SortOptions, SortingDiagram};
use kscatter::tropical::{build_curve, curve_dump, curve_skeleton, render_svg, LineArrangement};
use kscatter::verify::{run_suite, Status, Tier};
use kscatter::{Error, Quiver, Slope};

#[derive(Parser)]
#[command(
    name = "kscatter",
    version,
    about = "Sorting diagrams, tropical curves and Euler characteristics for covering Kronecker quivers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a covering fragment as a quiver file.
    Gen {
        #[command(flatten)]
        gen: GenArgs,
        /// Output file (stdout if absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sort the initial diagram to slope order and print the stable diagram.
    Sort {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        run: RunArgs,
        /// Also write the dump to <out>/diagram.txt.
        #[arg(long)]
        emit_dump: bool,
        /// Print every intermediate sequence.
        #[arg(long)]
        debug_history: bool,
    },
    /// Tropical curves of the stable diagram.
    Curves {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        run: RunArgs,
        /// Only curves of this slope, e.g. 2/5.
        #[arg(long)]
        mu: Option<Slope>,
        #[arg(long)]
        emit_svg: bool,
        #[arg(long)]
        emit_dump: bool,
    },
    /// Framed Euler characteristic of a Kronecker moduli space.
    Chi {
        #[arg(long)]
        m: u32,
        #[arg(long, num_args = 2, value_names = ["A", "B"])]
        dbar: Vec<i64>,
        #[arg(long, default_value = "B")]
        framing: Framing,
        /// direct, counts or factor
        #[arg(long, default_value = "direct")]
        route: Route,
    },
    /// Run the acceptance suites.
    Verify {
        #[arg(long)]
        slow_tier: bool,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
}

#[derive(Args, Clone)]
struct GenArgs {
    #[arg(long)]
    m: Option<u32>,
    #[arg(long, default_value_t = 2)]
    depth: u32,
    #[arg(long, default_value = "source")]
    root: RootKind,
}

#[derive(Args)]
struct Input {
    /// Quiver file; otherwise the fragment from --m, --depth, --root.
    #[arg(long, conflicts_with = "m")]
    quiver: Option<PathBuf>,
    #[command(flatten)]
    gen: GenArgs,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, default_value = "naive")]
    mode: Mode,
    #[arg(long, default_value_t = 1)]
    k: u32,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl Input {
    fn load(&self) -> anyhow::Result<Quiver> {
        match (&self.quiver, self.gen.m) {
            (Some(path), _) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                Ok(Quiver::from_json(&text)?)
            }
            (None, Some(m)) => Ok(build_covering_fragment(m, self.gen.depth, self.gen.root)?),
            (None, None) => bail!("give either --quiver <path> or --m with --depth and --root"),
        }
    }
}

impl RunArgs {
    fn diagram(&self, q: &Quiver, keep_history: bool) -> anyhow::Result<SortingDiagram> {
        if self.k < 1 {
            bail!("--k must be at least 1");
        }
        let levels = match self.mode {
            Mode::Naive => None,
            Mode::Nilpotent => Some(Levels::uniform(q.n(), self.k)?),
        };
        let options = SortOptions {
            keep_history,
            max_steps: Some(500_000_000),
            ..Default::default()
        };
        Ok(SortingDiagram::new(q, levels, options)?)
    }
}

/// `println!` that stops quietly on a closed pipe.
macro_rules! out {
    ($($arg:tt)*) => {{
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

fn write_file(path: &Path, text: &str) -> anyhow::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn file_stem(d_out: &str) -> String {
    d_out.replace('+', "_")
}

fn cmd_gen(gen: &GenArgs, out: Option<&Path>) -> anyhow::Result<()> {
    let Some(m) = gen.m else {
        bail!("gen needs --m");
    };
    let q = build_covering_fragment(m, gen.depth, gen.root)?;
    let text = q.to_json();
    match out {
        Some(p) => write_file(p, &format!("{text}\n")),
        None => {
            out!("{text}");
            Ok(())
        }
    }
}

fn cmd_sort(input: &Input, run: &RunArgs, emit_dump: bool, history: bool) -> anyhow::Result<()> {
    let q = input.load()?;
    let mut d = run.diagram(&q, history)?;
    let result = d.stabilize();
    if history {
        for (i, seq) in d.history().iter().enumerate() {
            let names: Vec<String> = seq.iter().map(|&id| d.node(id).op.d.to_string()).collect();
            out!("S^{i}\t{}", names.join(", "));
        }
    }
    if let Err(Error::Assumption(v)) = &result {
        out!(
            "violation: ⟨ξ,η⟩ = {} at step {} -> {}",
            v.bracket,
            v.step,
            v.step + 1
        );
        out!("xi = {}\neta = {}", v.d1, v.d2);
    }
    result?;
    out!(
        "# stable after {} steps, {} operators",
        d.step_count(),
        d.seq().len()
    );
    let _ = write!(std::io::stdout(), "{}", d.dump());
    if emit_dump {
        write_file(&run.out.join("diagram.txt"), &d.dump())?;
    }
    Ok(())
}

fn cmd_curves(
    input: &Input,
    run: &RunArgs,
    mu: Option<Slope>,
    svg: bool,
    dump: bool,
) -> anyhow::Result<()> {
    let q = input.load()?;
    let mut d = run.diagram(&q, false)?;
    d.stabilize()?;
    let arr = match d.levels() {
        Some(l) => LineArrangement::from_levels(&q, l)?,
        None => LineArrangement::from_levels(&q, &Levels::uniform(q.n(), 1)?)?,
    };
    let slopes = match mu {
        Some(m) => vec![m],
        None => d.slopes(),
    };
    let mut count = 0;
    for s in slopes {
        for (j, &id) in d.slope_block(s).iter().enumerate() {
            let h = match build_curve(&d, &arr, id) {
                Ok(h) => h,
                Err(Error::Degenerate(_)) => curve_skeleton(&d, id)?,
                Err(e) => return Err(e.into()),
            };
            if !h.contributes() {
                continue;
            }
            count += 1;
            let name = format!(
                "{}_{j:02}_{}",
                s.to_string().replace('/', "-"),
                file_stem(&h.d_out.to_string())
            );
            out!("{s}\t{}\tmult_Q={}\t{}", h.d_out, h.mult_q, name);
            if svg {
                write_file(
                    &run.out.join(format!("{name}.svg")),
                    &render_svg(&d, &arr, &h),
                )?;
            }
            if dump {
                write_file(&run.out.join(format!("{name}.txt")), &curve_dump(&d, &h))?;
            }
        }
    }
    out!("# {count} connected curves");
    Ok(())
}

fn cmd_chi(m: u32, dbar: &[i64], framing: Framing, route: Route) -> anyhow::Result<()> {
    let &[a, b] = dbar else {
        bail!("--dbar takes two integers");
    };
    let report = kronecker_euler_with(m, (a, b), framing, route)?;
    let _ = write!(std::io::stdout(), "{report}");
    Ok(())
}

fn cmd_verify(slow: bool, seed: u64) -> ExitCode {
    let tier = if slow { Tier::Slow } else { Tier::Default };
    out!("# verify seed={seed} tier={tier:?}");
    let lines = run_suite(tier, seed, |l| out!("{l}"));
    let hard: Vec<_> = lines.iter().filter(|l| l.is_hard_failure()).collect();
    let soft: Vec<_> = lines
        .iter()
        .filter(|l| matches!(l.status, Status::Soft(_)))
        .map(|l| {
            format!(
                "{} {}",
                l.id,
                if l.status == Status::Soft(true) {
                    "agrees"
                } else {
                    "differs"
                }
            )
        })
        .collect();
    out!("# soft checks: {}", soft.join(", "));
    match hard.first() {
        None => {
            out!("# all hard checks pass");
            ExitCode::SUCCESS
        }
        Some(first) => {
            let case = first
                .detail
                .iter()
                .find(|d| d.starts_with("FAIL"))
                .cloned()
                .unwrap_or_default();
            out!(
                "# {} hard failures; first: criterion {} {case}",
                hard.len(),
                first.id
            );
            ExitCode::from(1)
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Assumption(_)) => 2,
        Some(Error::Cap(_)) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Gen { gen, out } => cmd_gen(gen, out.as_deref()),
        Command::Sort {
            input,
            run,
            emit_dump,
            debug_history,
        } => cmd_sort(input, run, *emit_dump, *debug_history),
        Command::Curves {
            input,
            run,
            mu,
            emit_svg,
            emit_dump,
        } => cmd_curves(input, run, *mu, *emit_svg, *emit_dump),
        Command::Chi {
            m,
            dbar,
            framing,
            route,
        } => cmd_chi(*m, dbar, *framing, *route),
        Command::Verify { slow_tier, seed } => return cmd_verify(*slow_tier, *seed),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let code = exit_code(&e);
            eprintln!("error: {e:#}");
            if code == 3 {
                eprintln!("raise the limit with KSCATTER_CAP=<n> or pick a smaller input");
            }
            ExitCode::from(code)
        }
    }
}
