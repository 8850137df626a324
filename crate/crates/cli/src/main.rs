use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod output;

use output::Format;

#[derive(Parser, Debug)]
#[command(name = "singmod", version, about = "Class numbers, singular moduli and the exact checks around them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Output format.
    #[arg(long, value_enum, default_value = "human", global = true)]
    pub format: Format,
    /// Working precision for ball arithmetic.
    #[arg(long, default_value_t = 256, global = true)]
    pub prec_bits: u32,
    /// Worker threads for the sieve and case checks (default: up to 8).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Class number and 2-torsion of one discriminant.
    #[command(after_help = "CSV columns: delta,h,two_torsion,two_elementary,almost_two_elementary")]
    Classnum {
        #[arg(long, allow_hyphen_values = true)]
        delta: i64,
    },
    /// Reduced forms of a discriminant, optionally with a fixed `a`.
    #[command(after_help = "CSV columns: a,b,c")]
    Forms {
        #[arg(long, allow_hyphen_values = true)]
        delta: i64,
        #[arg(long)]
        a: Option<i64>,
    },
    /// Ψ(ℓ, Δ) and the class number of ℓ²Δ.
    #[command(after_help = "CSV columns: ell,delta,psi,unit_index,h_scaled")]
    Psi {
        #[arg(long)]
        ell: u64,
        #[arg(long, allow_hyphen_values = true)]
        delta: i64,
    },
    /// Residue multiplicities s(a) and the form-count bound S(A).
    #[command(after_help = "CSV columns: a,s_a,S_below_a,forms (forms only with --delta)")]
    Denominators {
        /// Tabulate 1 ≤ a ≤ max-a.
        #[arg(long, default_value_t = 30)]
        max_a: u64,
        /// Also count the forms of this discriminant per denominator.
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<i64>,
    },
    /// Admissible target denominators under an n-isogeny.
    #[command(after_help = "CSV columns: a_target")]
    Isogeny {
        #[arg(long)]
        n: u64,
        /// Source discriminant, used to check |Δ|^(1/2) ≥ 2na.
        #[arg(long, allow_hyphen_values = true)]
        delta: i64,
        /// Source denominator.
        #[arg(long)]
        a: u64,
        /// Target conductor (default: the source conductor).
        #[arg(long)]
        target_f: Option<u64>,
    },
    /// Certified j(τ), from a reduced form or from τ = x + iy.
    #[command(after_help = "CSV columns: re,im,integer (re and im as mid ± radius)")]
    Jeval {
        /// Reduced form `a,b,c`.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "tau")]
        form: Option<Vec<i64>>,
        /// `x,y` as decimals or fractions.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        tau: Option<Vec<String>>,
    },
    /// The q-expansion constant checks.
    #[command(after_help = "CSV columns: label,constant,majorant,margin,pass")]
    VerifyConstants,
    /// Masser's lattice bound and its specialization.
    #[command(after_help = "CSV columns: k,x,ell,constant,basis_bound,specialization_holds")]
    MasserBound {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        x: u64,
        #[arg(long, default_value_t = 1)]
        ell: u32,
        /// Ratios of singular moduli rather than the moduli themselves.
        #[arg(long)]
        ratios: bool,
    },
    /// The linear-relation and inequality hypotheses.
    #[command(after_help = "CSV columns: check,holds,lhs,rhs")]
    CheckHypothesis {
        /// Run the builtin parameter families and the final margin instead.
        #[arg(long, conflicts_with_all = ["k", "x", "y", "a"])]
        families: bool,
        #[arg(long, required_unless_present = "families")]
        k: Option<u64>,
        #[arg(long, required_unless_present = "families")]
        x: Option<u64>,
        #[arg(long, required_unless_present = "families")]
        y: Option<u64>,
        #[arg(long, required_unless_present = "families")]
        a: Option<u64>,
        /// ε for the inequality hypothesis, decimal or fraction.
        #[arg(long)]
        eps: Option<String>,
        /// |Δ| for the inequality hypothesis (default: x).
        #[arg(long)]
        abs_delta: Option<u64>,
    },
    /// Solve the case-analysis linear systems.
    #[command(after_help = "CSV columns: case_id,table,a_z,choice,right,kernel_dimension,kernel")]
    SolveCases {
        /// t2 (degree configurations), t3, t4, t5, lambda or all.
        #[arg(long, default_value = "all")]
        table: String,
    },
    /// Class-number sieve: the largest |Δ| ≤ bound with h(Δ) ≤ max-h.
    #[command(after_help = "CSV columns: delta,h,fundamental (one row per qualifying Δ)")]
    SearchWatkins {
        #[arg(long, default_value_t = 1_000_000)]
        bound: u64,
        #[arg(long, default_value_t = 64)]
        max_h: u64,
        /// Run the full bound 28753200 with h ≤ 100 (also needed for bounds above 2.5·10⁶).
        #[arg(long)]
        full: bool,
        /// Append finished `a`-ranges here.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Enumerate the (almost) 2-elementary discriminants.
    #[command(name = "search-2elem", after_help = "CSV columns: delta,h")]
    Search2elem {
        #[arg(long)]
        almost: bool,
        /// Skip the ω ∈ [7, 11] band check.
        #[arg(long)]
        no_bands: bool,
    },
    /// Exact check of Π vᵢ^{eᵢ} = 1 over the integers.
    #[command(after_help = "CSV columns: values,exponents,verified")]
    VerifyRelation {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        values: Vec<String>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        exps: Vec<i64>,
    },
    /// Every exponent vector with Σ eᵢ² ≤ cap and Π vᵢ^{eᵢ} = 1, as a lattice basis.
    #[command(after_help = "CSV columns: e1,e2,... (one basis vector per row)")]
    LatticeBruteforce {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        values: Vec<String>,
        #[arg(long, default_value_t = 12)]
        cap: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = cli.global.clone();
    let report = match commands::run(cli.command, &g) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let stdout = std::io::stdout();
    if let Err(e) = report.render(g.format, &mut stdout.lock()) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(report.exit_code() as u8)
}
