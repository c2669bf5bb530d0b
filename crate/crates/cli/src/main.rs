use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bh_core::{
    are_equivalent, builtin_family, fingerprint, haagerup, scan_family, smith_normal_form,
    ButsonMatrix, Catalog, Error, FamilySpec, GenerationMode,
};
use clap::{Args, Parser, Subcommand};

/// Enumerate, classify and identify Butson Hadamard matrices.
#[derive(Parser)]
#[command(name = "bh", version, about)]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate BH(q,n) and classify it up to equivalence.
    #[command(visible_alias = "classify")]
    Enumerate(EnumerateArgs),
    /// Print invariants of a matrix file (all of them unless selected).
    Invariants {
        file: PathBuf,
        #[arg(long)]
        haagerup: bool,
        #[arg(long)]
        fingerprint: bool,
        #[arg(long)]
        snf: bool,
    },
    /// Decide equivalence of two matrix files.
    Equiv { a: PathBuf, b: PathBuf },
    /// Evaluate or scan a parametric family.
    Family {
        #[command(subcommand)]
        action: FamilyAction,
    },
    /// Find the catalog class of a matrix file.
    Identify {
        file: PathBuf,
        #[arg(long)]
        catalog: PathBuf,
    },
    /// Print the class table of a catalog.
    Report { catalog: PathBuf },
}

#[derive(Args)]
struct EnumerateArgs {
    #[arg(long, default_value_t = 4)]
    q: u8,
    #[arg(long)]
    n: usize,
    /// Write the catalog JSON here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Weak pruning plus deduplication by canonical form.
    #[arg(long)]
    safe_mode: bool,
}

#[derive(Subcommand)]
enum FamilyAction {
    /// Evaluate a family at parameter exponents and print the matrix.
    Eval {
        /// Built-in family name (H4, D6, F8_5, S8_4, D8B_5) or a .fam path.
        #[arg(long)]
        family: String,
        /// Comma-separated parameter exponents, e.g. 0,0,1,1,0.
        #[arg(long, value_delimiter = ',')]
        params: Vec<u8>,
        /// Print the transpose of the evaluation.
        #[arg(long)]
        transpose: bool,
    },
    /// Evaluate every parameter tuple and map the results to catalog classes.
    Scan {
        #[arg(long)]
        family: String,
        #[arg(long)]
        with_transpose: bool,
        #[arg(long)]
        catalog: PathBuf,
    },
}

/// Outcome of a successful run: 0 for a positive answer, 1 for a negative one.
enum Outcome {
    Positive,
    Negative,
}

fn read_matrix(path: &Path) -> Result<ButsonMatrix, Error> {
    ButsonMatrix::parse_bhm(&std::fs::read_to_string(path)?)
}

fn load_family(name: &str) -> Result<FamilySpec, Error> {
    if let Some(f) = builtin_family(name) {
        return Ok(f);
    }
    if Path::new(name).exists() {
        return FamilySpec::parse(&std::fs::read_to_string(name)?);
    }
    Err(Error::Family {
        family: name.to_owned(),
        msg: "no built-in family or file with this name".into(),
    })
}

fn run(cli: Cli) -> Result<Outcome, Error> {
    match cli.command {
        Command::Enumerate(args) => {
            let mode = if args.safe_mode {
                GenerationMode::Safe
            } else {
                GenerationMode::Pruned
            };
            let started = std::time::Instant::now();
            let cat = Catalog::build(args.q, args.n, mode)?;
            log::info!("classified in {:.2?}", started.elapsed());
            match args.out {
                Some(path) => {
                    cat.save(&path)?;
                    println!("{}", cat.summary());
                }
                None => print!("{}", cat.to_json()),
            }
            Ok(Outcome::Positive)
        }
        Command::Invariants {
            file,
            haagerup: hg,
            fingerprint: fp,
            snf,
        } => {
            let h = read_matrix(&file)?;
            let all = !(hg || fp || snf);
            println!(
                "BH({},{}), Butson order {}",
                h.q(),
                h.n(),
                h.recognize_butson_order()
            );
            if all || hg {
                let m: Vec<String> = haagerup(&h).members.iter().map(u8::to_string).collect();
                println!("haagerup: {}", m.join(" "));
            }
            if all || fp {
                match fingerprint(&h) {
                    Ok(f) => println!("fingerprint: {f}"),
                    Err(Error::OrderTooSmall(_)) if all => {
                        println!("fingerprint: undefined for n < 4")
                    }
                    Err(e) => return Err(e),
                }
            }
            if all || snf {
                println!("snf: {}", smith_normal_form(&h));
            }
            Ok(Outcome::Positive)
        }
        Command::Equiv { a, b } => {
            let (h, k) = (read_matrix(&a)?, read_matrix(&b)?);
            match are_equivalent(&h, &k)? {
                Some(w) => {
                    println!("EQUIVALENT");
                    println!("{w}");
                    Ok(Outcome::Positive)
                }
                None => {
                    println!("INEQUIVALENT");
                    Ok(Outcome::Negative)
                }
            }
        }
        Command::Family { action } => match action {
            FamilyAction::Eval {
                family,
                params,
                transpose,
            } => {
                let spec = load_family(&family)?;
                let m = spec.eval(&params)?;
                let m = if transpose { m.transpose() } else { m };
                println!(
                    "# {}{}",
                    spec.label(&params),
                    if transpose { "^T" } else { "" }
                );
                print!("{}", m.to_bhm());
                Ok(Outcome::Positive)
            }
            FamilyAction::Scan {
                family,
                with_transpose,
                catalog,
            } => {
                let spec = load_family(&family)?;
                let cat = Catalog::load(&catalog)?;
                let rep = scan_family(&spec, &cat, with_transpose)?;
                print!("{rep}");
                Ok(Outcome::Positive)
            }
        },
        Command::Identify { file, catalog } => {
            let h = read_matrix(&file)?;
            let cat = Catalog::load(&catalog)?;
            match cat.identify(&h) {
                Ok((id, w)) => {
                    println!("class {id}");
                    println!("{w}");
                    Ok(Outcome::Positive)
                }
                Err(Error::NotInCatalog) => {
                    println!("NOT IN CATALOG");
                    Ok(Outcome::Negative)
                }
                Err(e) => Err(e),
            }
        }
        Command::Report { catalog } => {
            print!("{}", Catalog::load(&catalog)?.report());
            Ok(Outcome::Positive)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(Outcome::Positive) => ExitCode::SUCCESS,
        Ok(Outcome::Negative) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
