use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use cheeger_core::battery::{verify_suite, SCHEMA_VERSION};
use cheeger_core::graph::{conductance, phi_k_of_partition};
use cheeger_core::instances::{
    gen_complete, gen_cycle, gen_hypercube, gen_joined_expanders, gen_path, gen_planted_bisection, gen_stable_gadget,
    two_cliques_bridge,
};
use cheeger_core::io::{emit_edge_list, num17, nums17, parse_edge_list, parse_partition};
use cheeger_core::partition::{balanced_separator, spectral_maxcut, trace_json_lines};
use cheeger_core::regions::{appendix_a_certificate, main_func_dichotomy};
use cheeger_core::spectral::{dense_spectrum, split_from_spectrum};
use cheeger_core::step::improved_cheeger_from;
use cheeger_core::sweep::sweep_conductance_traced;
use cheeger_core::{Certificate, Error, Operator, WeightedGraph};

#[derive(Parser)]
#[command(name = "cheeger", version, about = "Spectral partitioning with certified Cheeger-type bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues of the normalized Laplacian (or the signless operator).
    Spectrum {
        file: String,
        #[arg(long)]
        signless: bool,
        /// Print only the k smallest eigenvalues.
        #[arg(long)]
        top: Option<usize>,
    },
    /// Sweep the second eigenfunction.
    Sweep {
        file: String,
        /// Sweep its nonnegative split (support volume at most half) instead.
        #[arg(long)]
        split: bool,
        /// Write the per-threshold conductances as CSV.
        #[arg(long)]
        trace: Option<String>,
    },
    /// Improved Cheeger, dyadic Cheeger and main-function certificates.
    Certify {
        file: String,
        #[arg(long)]
        k: usize,
        /// Certify every k from 2 to min(n, 12) instead.
        #[arg(long)]
        all_k: bool,
    },
    /// Balanced separator.
    Separator {
        file: String,
        #[arg(long)]
        k: usize,
        /// Write the iteration trace as JSON lines.
        #[arg(long)]
        trace: Option<String>,
    },
    /// Iterative spectral max cut.
    Maxcut {
        file: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        trace: Option<String>,
    },
    /// Generate a graph as an edge list.
    Gen {
        #[command(subcommand)]
        family: Family,
    },
    /// Run the full acceptance battery; exit 0 iff every criterion holds.
    VerifySuite {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Write the JSON report here instead of standard output.
        #[arg(long)]
        out: Option<String>,
    },
    /// φ_k of a partition, one part per line.
    Phik {
        file: String,
        #[arg(long)]
        parts: String,
    },
}

#[derive(Subcommand)]
enum Family {
    Cycle {
        n: usize,
        #[arg(default_value_t = 1.0)]
        weight: f64,
    },
    Complete {
        n: usize,
    },
    Path {
        n: usize,
    },
    Hypercube {
        d: usize,
    },
    /// Two copies of K_m joined by one edge.
    Barbell {
        m: usize,
        #[arg(default_value_t = 1.0)]
        weight: f64,
    },
    Planted {
        n: usize,
        p: f64,
        q: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    Expanders {
        m: usize,
        bridges: usize,
        #[arg(default_value_t = 1.0)]
        weight: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    Gadget {
        n: usize,
        c: f64,
    },
}

/// Failure of a run, with its exit code.
enum Failure {
    Core(Error),
    Certificate(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Core(Error::Io(e))
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. } => 3,
        Error::Capacity { .. } => 4,
        Error::Numerical(_) => 1,
        Error::Domain(_) | Error::Io(_) => 2,
    }
}

fn read_input(path: &str) -> io::Result<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path)
    }
}

fn write_output(path: &str, text: &str) -> io::Result<()> {
    if path == "-" {
        io::stdout().write_all(text.as_bytes())
    } else {
        fs::write(path, text)
    }
}

fn load(path: &str) -> Result<WeightedGraph, Failure> {
    Ok(parse_edge_list(&read_input(path)?)?)
}

fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("JSON serializes"));
}

fn report(mut v: Value) -> Value {
    v["schema_version"] = json!(SCHEMA_VERSION);
    v
}

fn spectrum(file: &str, signless: bool, top: Option<usize>) -> Result<(), Failure> {
    let g = load(file)?;
    let op = if signless { Operator::Signless } else { Operator::Laplacian };
    let s = dense_spectrum(&g, op)?;
    let shown = top.unwrap_or(s.len()).min(s.len());
    print_json(&report(json!({
        "operator": op,
        "n": g.n(),
        "eigenvalues": nums17(&s.eigenvalues[..shown]),
    })));
    Ok(())
}

fn sweep(file: &str, split: bool, trace: Option<&str>) -> Result<(), Failure> {
    let g = load(file)?;
    let spectrum = dense_spectrum(&g, Operator::Laplacian)?;
    let f = if split {
        split_from_spectrum(&g, &spectrum)?
    } else {
        spectrum.eigenfunction(2).to_vec()
    };
    let r = sweep_conductance_traced(&g, &f)?;
    if let (Some(path), Some(rows)) = (trace, &r.trace) {
        let mut csv = String::from("threshold,conductance\n");
        for (t, phi) in rows {
            csv.push_str(&format!("{t:.16e},{phi:.16e}\n"));
        }
        write_output(path, &csv)?;
    }
    print_json(&report(json!({
        "phi": num17(r.value),
        "threshold": num17(r.threshold),
        "set": r.set.vertices(),
    })));
    Ok(())
}

fn certify_k(g: &WeightedGraph, f: &[f64], lambda_k: f64, k: usize) -> Result<Vec<Certificate>, Failure> {
    let improved = improved_cheeger_from(g, f, k, lambda_k)?;
    let dichotomy = main_func_dichotomy(g, f, k)?;
    Ok(vec![improved, dichotomy.certificate().clone()])
}

fn certify(file: &str, k: usize, all_k: bool) -> Result<(), Failure> {
    let g = load(file)?;
    let n = g.n();
    let ks: Vec<usize> = if all_k {
        (2..=n.min(12)).collect()
    } else if (2..=n).contains(&k) {
        vec![k]
    } else {
        return Err(Error::Domain(format!("k must be in 2..={n}, got {k}")).into());
    };
    let spectrum = dense_spectrum(&g, Operator::Laplacian)?;
    let f = split_from_spectrum(&g, &spectrum)?;
    let mut certs = vec![appendix_a_certificate(&g, &f)?];
    for k in ks {
        certs.extend(certify_k(&g, &f, spectrum.eigenvalue(k), k)?);
    }
    let holds = certs.iter().all(Certificate::all_hold);
    print_json(&report(json!({
        "holds": holds,
        "lambda2": num17(spectrum.eigenvalue(2)),
        "certificates": certs.iter().map(Certificate::to_json).collect::<Vec<_>>(),
    })));
    if holds {
        Ok(())
    } else {
        Err(Failure::Certificate("a certificate failed".into()))
    }
}

fn separator(file: &str, k: usize, trace: Option<&str>) -> Result<(), Failure> {
    let g = load(file)?;
    let r = balanced_separator(&g, k)?;
    if let Some(path) = trace {
        write_output(path, &trace_json_lines(&r.trace_json()))?;
    }
    print_json(&report(json!({
        "set": r.set.vertices(),
        "volume": num17(r.set.volume()),
        "total_volume": num17(g.total_volume()),
        "conductance": num17(r.conductance),
        "iterations": r.iterations,
        "lambda_k": r.lambda_k.map(num17),
        "bisection_optimum": r.bisection.map(num17),
        "merge_certificate": r.merge_certificate.to_json(),
    })));
    if r.merge_certificate.all_hold() {
        Ok(())
    } else {
        Err(Failure::Certificate("merge certificate failed".into()))
    }
}

fn maxcut(file: &str, k: usize, trace: Option<&str>) -> Result<(), Failure> {
    let g = load(file)?;
    let r = spectral_maxcut(&g, k)?;
    if let Some(path) = trace {
        write_output(path, &trace_json_lines(&r.trace_json()))?;
    }
    let holds = r.guarantee.is_none_or(|b| b <= r.cut_fraction + 1e-9);
    print_json(&report(json!({
        "left": r.cut.left.vertices(),
        "right": r.cut.right.vertices(),
        "cut_weight": num17(r.cut_weight),
        "cut_fraction": num17(r.cut_fraction),
        "alpha_k": r.alpha_k.map(num17),
        "epsilon": r.epsilon.map(num17),
        "guarantee": r.guarantee.map(num17),
        "iterations": r.iterations,
    })));
    if holds {
        Ok(())
    } else {
        Err(Failure::Certificate("cut fraction below the guarantee".into()))
    }
}

fn generate(family: &Family) -> Result<(), Failure> {
    let mut header = String::new();
    let g = match *family {
        Family::Cycle { n, weight } => gen_cycle(n, weight)?,
        Family::Complete { n } => gen_complete(n)?,
        Family::Path { n } => gen_path(n)?,
        Family::Hypercube { d } => gen_hypercube(d)?,
        Family::Barbell { m, weight } => two_cliques_bridge(m, weight)?,
        Family::Planted { n, p, q, seed } => {
            let inst = gen_planted_bisection(n, p, q, seed)?;
            let ids = |xs: &[usize]| xs.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
            header = format!("# planted x: {}\n# planted y: {}\n", ids(&inst.x), ids(&inst.y));
            inst.graph
        }
        Family::Expanders { m, bridges, weight, seed } => gen_joined_expanders(m, bridges, weight, seed)?,
        Family::Gadget { n, c } => gen_stable_gadget(n, c)?,
    };
    write_output("-", &(header + &emit_edge_list(&g)))?;
    Ok(())
}

fn verify(seed: u64, out: Option<&str>) -> Result<(), Failure> {
    let r = verify_suite(seed)?;
    for c in &r.criteria {
        eprintln!("{}", c.summary_line());
    }
    write_output(out.unwrap_or("-"), &r.to_json_string())?;
    if r.all_pass() {
        Ok(())
    } else {
        Err(Failure::Certificate("the battery has failing criteria".into()))
    }
}

fn phik(file: &str, parts_file: &str) -> Result<(), Failure> {
    let g = load(file)?;
    let parts = parse_partition(&g, &read_input(parts_file)?)?;
    let phi_k = phi_k_of_partition(&g, &parts)?;
    let each = parts
        .iter()
        .map(|p| conductance(&g, p))
        .collect::<Result<Vec<_>, _>>()?;
    print_json(&report(json!({
        "parts": parts.len(),
        "phi_k": num17(phi_k),
        "conductances": nums17(&each),
    })));
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Spectrum { file, signless, top } => spectrum(file, *signless, *top),
        Command::Sweep { file, split, trace } => sweep(file, *split, trace.as_deref()),
        Command::Certify { file, k, all_k } => certify(file, *k, *all_k),
        Command::Separator { file, k, trace } => separator(file, *k, trace.as_deref()),
        Command::Maxcut { file, k, trace } => maxcut(file, *k, trace.as_deref()),
        Command::Gen { family } => generate(family),
        Command::VerifySuite { seed, out } => verify(*seed, out.as_deref()),
        Command::Phik { file, parts } => phik(file, parts),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Certificate(msg)) => {
            eprintln!("cheeger: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Core(e)) => {
            eprintln!("cheeger: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
