//! `wittgr`: point counts, Kazhdan–Lusztig data and verification suites.
//!
//! Exit status: 0 when the record passes, 1 when a checked assertion
//! fails, 2 for usage, precision and other errors.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use config::{parse_seed, FileConfig, RunConfig};
use output::Format;

#[derive(Parser, Debug)]
#[command(name = "wittgr", version, about = "Witt vectors, affine Grassmannian counts and KL polynomials")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalOpts {
    /// Output format: json, csv or pretty.
    #[arg(long, global = true, value_parser = clap::value_parser!(Format))]
    format: Option<Format>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for all randomized checks (decimal or 0x hex).
    #[arg(long, global = true, value_parser = parse_seed)]
    seed: Option<u64>,
    /// Cache directory (default: $WITTGR_CACHE_DIR, if set).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Ignore and do not write caches.
    #[arg(long, global = true)]
    no_cache: bool,
    /// `key = value` file with seed, format, threads, cache_dir.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Truncated Witt vector arithmetic.
    #[command(subcommand)]
    Witt(WittCmd),
    /// Lattice point counts over F_q.
    #[command(subcommand)]
    Count(CountCmd),
    /// Kazhdan–Lusztig polynomials.
    #[command(subcommand)]
    Kl(KlCmd),
    /// Lusztig–Vogan polynomials.
    #[command(subcommand)]
    Lv(LvCmd),
    /// Verification suites.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Affine Deligne–Lusztig sets.
    #[command(subcommand)]
    Adlv(AdlvCmd),
}

#[derive(Subcommand, Debug)]
enum WittCmd {
    /// Evaluates one operation on Witt coordinates.
    Eval(WittEval),
    /// Checks the factorization of the Weyl element over W(F_p)[1/p].
    VerifyIdentity(IdentityArgs),
}

#[derive(Args, Debug, Serialize)]
struct WittEval {
    #[arg(long)]
    p: u32,
    #[arg(long, default_value_t = 1)]
    r: u32,
    #[arg(long)]
    h: u32,
    /// add, sub, mul, neg, inverse, frobenius, verschiebung, teichmuller
    #[arg(long)]
    op: String,
    /// Witt coordinates as field codes, e.g. 1,0,1.
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct IdentityArgs {
    #[arg(long)]
    p: u32,
    #[arg(long)]
    h: u32,
}

#[derive(Args, Debug, Serialize)]
struct CountOpts {
    /// Field sizes; without them the count is fitted as a polynomial in q.
    #[arg(long, value_delimiter = ',')]
    q: Vec<u64>,
    /// mixed (W(F_q)) or equal (F_q[[t]]).
    #[arg(long, default_value = "mixed")]
    kind: String,
    /// Also fit the polynomial in q.
    #[arg(long)]
    poly: bool,
}

#[derive(Subcommand, Debug)]
enum CountCmd {
    /// |Gr_mu(F_q)|, or |Gr_{<=mu}| with --leq.
    Cell {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
        #[arg(long)]
        leq: bool,
        #[command(flatten)]
        opts: CountOpts,
    },
    /// |S_lambda ∩ Gr_mu(F_q)|, or with Gr_{<=mu} under --leq.
    Mv {
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
        #[arg(long)]
        leq: bool,
        #[command(flatten)]
        opts: CountOpts,
    },
    /// Lattice chains with steps such as "1,0;1,0".
    Chain {
        #[arg(long, allow_hyphen_values = true)]
        steps: String,
        #[command(flatten)]
        opts: CountOpts,
    },
    /// Chains ending at p^lambda Lambda_0.
    Fiber {
        #[arg(long, allow_hyphen_values = true)]
        steps: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[command(flatten)]
        opts: CountOpts,
    },
}

#[derive(Args, Debug, Serialize)]
struct GroupArgs {
    /// affine-aN, or a Cartan type such as B3 or affine-g2.
    #[arg(long = "type")]
    type_name: String,
    #[arg(long)]
    len_cap: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum KlCmd {
    /// P_{y,w}, or the whole column of w.
    Compute {
        #[command(flatten)]
        group: GroupArgs,
        /// Word such as 0,1,0, with optional ;tau=k, or a window [..].
        #[arg(long)]
        w: String,
        #[arg(long)]
        y: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
enum LvCmd {
    /// P^sigma_{y,w}, or the whole column of w.
    Compute {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        w: String,
        #[arg(long)]
        y: Option<String>,
        /// id, diagram:PERM (e.g. diagram:1,0,2) or affine:K.
        #[arg(long, default_value = "id")]
        twist: String,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    /// P^sigma_{d_lambda,d_mu}(q) = P_{d_lambda,d_mu}(-q).
    MinusQ(GroupArgs),
    /// Lusztig–Kato expansion against charge Kostka–Foulkes polynomials.
    SatakeLk {
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
        #[arg(long, default_value = "mixed")]
        kind: String,
    },
    /// Affine KL polynomials at d_lambda, d_mu next to charge Kostka–Foulkes
    /// polynomials (a report, never a failure).
    KlKostka {
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
    },
    /// Degree and leading coefficient of |S_lambda ∩ Gr_{<=mu}|.
    MvLeading {
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
        /// Defaults to every weight of V_mu.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        #[arg(long, default_value = "mixed")]
        kind: String,
    },
    /// Degree bounds and leading terms of convolution fibers.
    Semismall {
        #[arg(long, allow_hyphen_values = true)]
        steps: String,
        #[arg(long, default_value = "mixed")]
        kind: String,
    },
    /// Cells of Gr_{<=(2,0)} over W(F_q) and F_q[[t]].
    MixedVsEqual {
        #[arg(long)]
        q: u64,
    },
    /// Randomized chart, membership and factorization checks for GL_2.
    B3 {
        #[arg(long)]
        q: u64,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        /// Samples for the field-level identity check.
        #[arg(long, default_value_t = 10_000)]
        samples: u64,
    },
    /// Torsor count against |Gr_{<=(2,0)}| |GL_2(W_3)|.
    Quotient {
        #[arg(long)]
        q: u64,
    },
}

#[derive(Args, Debug, Serialize)]
struct BArgs {
    #[arg(long, default_value_t = 2)]
    p: u32,
    #[arg(long)]
    n: usize,
    /// id, superbasic[:k], diag:e1,..,en or matrix:a,b;c,d[/p^s].
    #[arg(long)]
    b: String,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
}

#[derive(Args, Debug, Serialize)]
struct WindowArgs {
    /// Window depth N: p^N Lambda_0 ⊂ L ⊂ Lambda_0.
    #[arg(long)]
    depth: Option<u32>,
    /// Valuation of det; defaults to the depth.
    #[arg(long)]
    det: Option<u32>,
}

#[derive(Subcommand, Debug)]
enum AdlvCmd {
    /// Newton point of b.
    Newton(BArgs),
    /// Defect of b.
    Defect(BArgs),
    /// Fitted dimension against the dimension formula.
    Dim {
        #[command(flatten)]
        b: BArgs,
        #[arg(long, value_delimiter = ',', default_values_t = [1u32, 2, 3, 4, 5])]
        r: Vec<u32>,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Lattices in the window with inv(b sigma(L), L) = mu (or <= mu).
    Count {
        #[command(flatten)]
        b: BArgs,
        #[arg(long, default_value_t = 1)]
        r: u32,
        #[arg(long, default_value = "eq")]
        mode: String,
        #[command(flatten)]
        window: WindowArgs,
    },
    /// Restriction of scalars against the norm for d components.
    NormReduce {
        #[arg(long, default_value_t = 2)]
        p: u32,
        #[arg(long, default_value_t = 1)]
        r: u32,
        /// Components separated by '|', e.g. "id|superbasic:1".
        #[arg(long)]
        b: String,
        /// Coweights separated by ';'.
        #[arg(long, allow_hyphen_values = true)]
        mu: String,
        #[command(flatten)]
        window: WindowArgs,
    },
}

fn settings(g: &GlobalOpts) -> Result<RunConfig, String> {
    let file = match &g.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let mut cfg = RunConfig::default();
    cfg.seed = g.seed.or(file.seed).unwrap_or(cfg.seed);
    cfg.format = g.format.or(file.format).unwrap_or(cfg.format);
    cfg.threads = g.threads.or(file.threads);
    if !g.no_cache {
        cfg.cache_dir = g.cache_dir.clone().or(file.cache_dir).or_else(wittgr::cache::dir_from_env);
    }
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match settings(&cli.global) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    if let Some(n) = cfg.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli.command, &cfg) {
        Ok(record) => {
            print!("{}", record.render(cfg.format));
            if record.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
