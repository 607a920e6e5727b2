//! Command-line front end. Every analysis is a subcommand; results go to
//! standard output as `{"subcommand", "parameters", "payload"}` JSON, or as
//! CSV for tabular payloads.

use std::ffi::OsString;
use std::io::Write;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use entspread_core::bounds::{
    capacity_table, dilution_cost_curve, spread_capacity_interval, thm1_lower_bound, thm2_bound, Resource,
};
use entspread_core::capacity::{
    build_uf, channel_rates, entangling_power, operator_schmidt_rank, qrst_region_check, OptimizerSettings, RateTriple,
};
use entspread_core::linalg::CMatrix;
use entspread_core::protocols::{binary_entropy, clean_demo, concentration_sample, dirty_demo, run_superposed, Superposition};
use entspread_core::spectra::{
    entanglement_moments, generalized_spread, renyi_entropy, smoothed_spread, smoothed_spread_bruteforce, spread,
    tensor_power, tensor_product, Order,
};
use entspread_core::states::{embezzle_fidelity, local_conversion_fidelity};
use entspread_core::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::io::{load_channel, load_gate, load_program, load_spectrum};
use crate::output::{num, render_csv, render_json, Table};

/// Each module operation and the one subcommand that exposes it.
pub const OPERATION_MAP: &[(&str, &str)] = &[
    ("schmidt_spectrum_of", "analyze"),
    ("renyi_entropy", "analyze"),
    ("entanglement_moments", "analyze"),
    ("spread", "analyze"),
    ("generalized_spread", "analyze"),
    ("tensor_product", "analyze"),
    ("spectrum_of_named", "analyze"),
    ("local_conversion_fidelity", "analyze"),
    ("thm1_lower_bound", "analyze"),
    ("smoothed_spread", "smooth"),
    ("smoothed_spread_bruteforce", "smooth"),
    ("tensor_power", "power"),
    ("dilution_cost_curve", "dilution-curve"),
    ("spread_capacity_interval", "capacity-table"),
    ("embezzle_fidelity", "embezzle"),
    ("entangling_power", "entangling-power"),
    ("thm2_bound", "entangling-power"),
    ("build_uf", "uf"),
    ("channel_rates", "qrst"),
    ("optimize_rates", "qrst"),
    ("qrst_region_check", "qrst"),
    ("new_session", "superpose-demo"),
    ("step", "superpose-demo"),
    ("destroy_ebit_via_cbit", "superpose-demo"),
    ("noop_random_bit", "superpose-demo"),
    ("run_superposed", "superpose-demo"),
    ("concentration_sample", "concentrate"),
];

pub const SUBCOMMANDS: &[&str] = &[
    "analyze",
    "smooth",
    "power",
    "dilution-curve",
    "capacity-table",
    "embezzle",
    "entangling-power",
    "uf",
    "qrst",
    "superpose-demo",
    "concentrate",
];

#[derive(Debug, Parser)]
#[command(name = "entspread", version, about = "Entanglement spread, clean protocols and capacity bounds")]
pub struct Cli {
    /// Output format; CSV applies to tabular payloads only.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Significant digits in numeric output.
    #[arg(long, global = true, default_value_t = 6, value_parser = clap::value_parser!(u8).range(1..=17))]
    pub precision: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropies, spread and moments of a spectrum; optional conversion bound to a target.
    Analyze(AnalyzeArgs),
    /// Smoothed spread at one or more error levels.
    Smooth(SmoothArgs),
    /// Spread of tensor powers.
    Power(PowerArgs),
    /// Communication lower bound for entanglement dilution versus the number of copies.
    DilutionCurve(DilutionArgs),
    /// Spread capacity intervals of communication and entanglement resources.
    CapacityTable(CapacityArgs),
    /// Fidelity of embezzling a target state from an embezzling state.
    Embezzle(EmbezzleArgs),
    /// Single-shot entangling power of a two-party gate and the implied communication bound.
    EntanglingPower(EntanglingArgs),
    /// The diagonal gate of a two-party boolean function.
    Uf(UfArgs),
    /// Rate-region check for simulating a channel.
    Qrst(QrstArgs),
    /// Clean and dirty protocols run in superposition.
    SuperposeDemo(SuperposeArgs),
    /// Monte Carlo entanglement concentration.
    Concentrate(ConcentrateArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct AnalyzeArgs {
    /// Named state (partial:0.25, ebits:3, embezzler:16, product) or a .json spectrum/state file.
    #[arg(long)]
    pub state: String,
    /// Tensor the state with another before analysis.
    #[arg(long)]
    pub times: Option<String>,
    /// Target state for the conversion fidelity and communication bound.
    #[arg(long)]
    pub target: Option<String>,
    /// Conversion error used for the bound.
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    /// Renyi orders of a generalized spread `E_alpha - E_beta` (`inf` allowed).
    #[arg(long, requires = "beta")]
    pub alpha: Option<String>,
    #[arg(long, requires = "alpha")]
    pub beta: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct SmoothArgs {
    #[arg(long)]
    pub state: String,
    #[arg(long, value_delimiter = ',', required = true)]
    pub eps: Vec<f64>,
    /// Exhaustive search over eigenvalue subsets (at most 20 eigenvalues).
    #[arg(long)]
    pub exhaustive: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct PowerArgs {
    #[arg(long)]
    pub state: String,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<u32>,
    #[arg(long, default_value_t = 0.01)]
    pub eps: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct DilutionArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub eps: f64,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<u32>,
}

#[derive(Debug, Args, Serialize)]
pub struct CapacityArgs {
    /// Resources to evaluate instead of the standard table (repeatable),
    /// e.g. `partial:0.1,1000,0.01`.
    #[arg(long)]
    pub resource: Vec<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct EmbezzleArgs {
    /// Embezzler sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<u32>,
    /// Target state.
    #[arg(long, default_value = "ebits:1")]
    pub state: String,
}

#[derive(Debug, Args, Serialize)]
pub struct EntanglingArgs {
    /// Preset (identity, cnot, swap, cz) or a .json matrix file.
    #[arg(long)]
    pub gate: String,
    /// Ancilla dimensions on Alice's and Bob's side.
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [2, 2])]
    pub ancillas: Vec<usize>,
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoolFunction {
    Equality,
    And,
    Or,
    Xor,
    Zero,
}

#[derive(Debug, Args, Serialize)]
#[command(group(ArgGroup::new("source").required(true).args(["table", "function"])))]
pub struct UfArgs {
    /// Truth table, rows separated by `;`, e.g. `1,0;0,1`.
    #[arg(long)]
    pub table: Option<String>,
    /// Bitwise function of two `bits`-bit strings (equality compares whole strings).
    #[arg(long, value_enum)]
    pub function: Option<BoolFunction>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=3))]
    pub bits: u32,
    /// Restarts for the entangling-power estimate; 0 skips it.
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct QrstArgs {
    /// Preset (dephasing:p, depolarizing:p, amplitude-damping:g, identity) or a .json Kraus file.
    #[arg(long)]
    pub channel: String,
    #[arg(long)]
    pub c1: f64,
    #[arg(long)]
    pub c2: f64,
    #[arg(long)]
    pub e: f64,
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    #[arg(long, default_value_t = 100)]
    pub iterations: usize,
    /// Grid resolution; 0 disables the grid sweep.
    #[arg(long, default_value_t = 16)]
    pub grid: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-3)]
    pub tolerance: f64,
}

#[derive(Debug, Args, Serialize)]
#[command(group(ArgGroup::new("mode").required(true).args(["clean", "dirty", "program"])))]
pub struct SuperposeArgs {
    /// Destroy-an-ebit superposed with sending a random bit.
    #[arg(long)]
    pub clean: bool,
    /// Leaking half an ebit superposed with doing nothing.
    #[arg(long)]
    pub dirty: bool,
    /// A .json program file with input, branches and amplitudes.
    #[arg(long)]
    pub program: Option<String>,
}

#[derive(Debug, Args, Serialize)]
pub struct ConcentrateArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub n: u64,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Floor each yield to whole ebits.
    #[arg(long)]
    pub floor: bool,
    /// Include the individual samples as table rows.
    #[arg(long)]
    pub samples: bool,
}

struct Output {
    payload: Value,
    table: Option<Table>,
}

impl Output {
    fn object(payload: Value) -> Self {
        Self { payload, table: None }
    }

    fn table(table: Table) -> Self {
        Self { payload: json!({ "rows": table.to_json() }), table: Some(table) }
    }
}

enum Failure {
    Usage(String),
    Domain(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Domain(e)
    }
}

impl From<entspread_core::Error> for Failure {
    fn from(e: entspread_core::Error) -> Self {
        Failure::Domain(e.into())
    }
}

type CmdResult = Result<Output, Failure>;

fn parse_order(s: &str) -> Result<Order, Failure> {
    match s.trim() {
        "inf" | "infinity" => Ok(Order::Infinity),
        other => other.parse::<f64>().map(Order::Finite).map_err(|_| Failure::Usage(format!("invalid Renyi order `{s}`"))),
    }
}

fn analyze(a: &AnalyzeArgs) -> CmdResult {
    let mut spec = load_spectrum(&a.state)?;
    if let Some(t) = &a.times {
        spec = tensor_product(&spec, &load_spectrum(t)?);
    }
    let (e, sigma) = entanglement_moments(&spec);
    let mut payload = json!({
        "num_classes": spec.num_classes(),
        "log2_rank": num(spec.log2_rank()),
        "entropies": {
            "0": num(renyi_entropy(&spec, 0.0)?),
            "1": num(renyi_entropy(&spec, 1.0)?),
            "2": num(renyi_entropy(&spec, 2.0)?),
            "inf": num(renyi_entropy(&spec, Order::Infinity)?),
        },
        "spread": num(spread(&spec)),
        "moments": { "E": num(e), "sigma": num(sigma) },
    });
    if let (Some(alpha), Some(beta)) = (&a.alpha, &a.beta) {
        payload["generalized_spread"] = num(generalized_spread(&spec, parse_order(alpha)?, parse_order(beta)?)?);
    }
    if let Some(t) = &a.target {
        let target = load_spectrum(t)?;
        let bound = thm1_lower_bound(&spec, &target, a.eps)?;
        payload["conversion"] = json!({
            "local_fidelity": num(local_conversion_fidelity(&spec, &target)),
            "communication_bound": num(bound.bound_value),
            "delta": num(bound.delta),
            "target_smoothed_spread": num(bound.target_spread),
            "source_spread": num(bound.source_spread),
        });
    }
    Ok(Output::object(payload))
}

fn smooth(a: &SmoothArgs) -> CmdResult {
    let spec = load_spectrum(&a.state)?;
    let mut t = Table::new(&["eps", "smoothed_spread"]);
    for &eps in &a.eps {
        let v = if a.exhaustive { smoothed_spread_bruteforce(&spec, eps)? } else { smoothed_spread(&spec, eps)? };
        t.push(vec![num(eps), num(v)]);
    }
    Ok(Output::table(t))
}

fn power(a: &PowerArgs) -> CmdResult {
    let base = load_spectrum(&a.state)?;
    let mut t = Table::new(&["n", "sqrt_n", "num_classes", "log2_rank", "entropy", "spread", "smoothed_spread", "smoothed_over_sqrt_n"]);
    for &n in &a.n {
        let s = tensor_power(&base, n)?;
        let sm = smoothed_spread(&s, a.eps)?;
        let root = (n as f64).sqrt();
        t.push(vec![
            json!(n),
            num(root),
            json!(s.num_classes()),
            num(s.log2_rank()),
            num(entanglement_moments(&s).0),
            num(spread(&s)),
            num(sm),
            num(sm / root),
        ]);
    }
    Ok(Output::table(t))
}

fn dilution(a: &DilutionArgs) -> CmdResult {
    let mut t = Table::new(&["n", "sqrt_n", "ebits", "bound"]);
    for p in dilution_cost_curve(a.p, a.eps, &a.n)? {
        t.push(vec![json!(p.n), num(p.sqrt_n), json!(p.ebits), num(p.bound)]);
    }
    Ok(Output::table(t))
}

fn capacity(a: &CapacityArgs) -> CmdResult {
    let rows = if a.resource.is_empty() {
        capacity_table()
    } else {
        a.resource
            .iter()
            .map(|r| {
                let res: Resource = r.parse()?;
                Ok((res, spread_capacity_interval(&res)?))
            })
            .collect::<Result<Vec<_>, entspread_core::Error>>()?
    };
    let mut t = Table::new(&["resource", "min", "max"]);
    for (r, i) in rows {
        t.push(vec![json!(r.to_string()), num(i.min), num(i.max)]);
    }
    Ok(Output::table(t))
}

fn embezzle(a: &EmbezzleArgs) -> CmdResult {
    let target = load_spectrum(&a.state)?;
    let mut t = Table::new(&["n", "fidelity", "error"]);
    for &n in &a.n {
        let f = embezzle_fidelity(n, &target)?;
        t.push(vec![json!(n), num(f), num(1.0 - f)]);
    }
    Ok(Output::table(t))
}

fn entangling(a: &EntanglingArgs) -> CmdResult {
    let u = load_gate(&a.gate)?;
    let anc = (a.ancillas[0], a.ancillas[1]);
    let fwd = entangling_power(&u, anc, a.restarts, a.seed)?;
    let back = entangling_power(&u.adjoint(), anc, a.restarts, a.seed)?;
    Ok(Output::object(json!({
        "E_U": num(fwd.value),
        "E_U_dagger": num(back.value),
        "log2_operator_schmidt_rank": num(fwd.upper_bound),
        "qubit_lower_bound": num(thm2_bound(fwd.value, back.value)?),
    })))
}

fn truth_table(a: &UfArgs) -> Result<Vec<Vec<bool>>, Failure> {
    if let Some(text) = &a.table {
        return text
            .split(';')
            .map(|row| {
                row.split(',')
                    .map(|c| match c.trim() {
                        "0" => Ok(false),
                        "1" => Ok(true),
                        other => Err(Failure::Usage(format!("truth table entries are 0 or 1, got `{other}`"))),
                    })
                    .collect()
            })
            .collect();
    }
    let f = a.function.expect("clap enforces table or function");
    let size = 1usize << a.bits;
    let mask = size - 1;
    Ok((0..size)
        .map(|x| {
            (0..size)
                .map(|y| match f {
                    BoolFunction::Equality => x == y,
                    BoolFunction::And => (x & y) == mask,
                    BoolFunction::Or => (x | y) != 0,
                    BoolFunction::Xor => ((x ^ y).count_ones() & 1) == 1,
                    BoolFunction::Zero => false,
                })
                .collect()
        })
        .collect())
}

fn uf(a: &UfArgs) -> CmdResult {
    let u = build_uf(&truth_table(a)?)?;
    let (da, db) = u.dims();
    let m = u.matrix();
    let diagonal: Vec<Value> = (0..da * db).map(|i| json!(m[(i, i)].re.round() as i64)).collect();
    let square = m.matmul(m);
    let mut payload = json!({
        "dA": da,
        "dB": db,
        "diagonal": diagonal,
        "self_inverse": square.sub(&CMatrix::identity(da * db)).max_abs() < 1e-12,
        "operator_schmidt_rank": operator_schmidt_rank(&u),
    });
    if a.restarts > 0 {
        let ep = entangling_power(&u, (2, 2), a.restarts, a.seed)?;
        payload["entangling_power"] = num(ep.value);
    }
    Ok(Output::object(payload))
}

fn qrst(a: &QrstArgs) -> CmdResult {
    let ch = load_channel(&a.channel)?;
    let settings = OptimizerSettings {
        restarts: a.restarts,
        iterations: a.iterations,
        seed: a.seed,
        grid_steps: (a.grid > 0).then_some(a.grid),
    };
    let report = qrst_region_check(&ch, RateTriple { c1: a.c1, c2: a.c2, e: a.e }, &settings, a.tolerance)?;
    let d = ch.input_dim();
    let mixed = CMatrix::identity(d).scale(Complex64::new(1.0 / d as f64, 0.0));
    let r = channel_rates(&ch, &mixed)?;
    Ok(Output::object(json!({
        "feasible": report.feasible,
        "slacks": {
            "forward": num(report.slacks[0]),
            "entanglement": num(report.slacks[1]),
            "backward": num(report.slacks[2]),
        },
        "max_I_AB": num(report.max_i),
        "max_S_B": num(report.max_sb),
        "min_region_term": num(report.min_term),
        "rates_at_maximally_mixed": { "I_AB": num(r.i_ab), "S_B": num(r.s_b) },
    })))
}

fn superposition_payload(s: &Superposition) -> Value {
    let ledgers: Vec<Value> = s
        .ledgers
        .iter()
        .map(|l| {
            json!({
                "cbits": l.cbits,
                "qubits": l.qubits,
                "ebits_consumed": l.ebits_consumed,
                "ebits_created": l.ebits_created,
                "leaked": l.leaked,
            })
        })
        .collect();
    json!({
        "fidelity": num(s.fidelity),
        "residual_trace_distance": num(s.residual_distance),
        "slots": s.labels,
        "dims": s.dims,
        "ledgers": ledgers,
    })
}

fn superpose(a: &SuperposeArgs) -> CmdResult {
    let s = if a.clean {
        clean_demo()?
    } else if a.dirty {
        dirty_demo()?
    } else {
        let program = load_program(a.program.as_deref().expect("clap enforces one mode"))?;
        run_superposed(&program.input, &program.branches, &program.amplitudes)?
    };
    Ok(Output::object(superposition_payload(&s)))
}

fn concentrate(a: &ConcentrateArgs) -> CmdResult {
    let run = concentration_sample(a.p, a.n, a.trials, a.seed, a.floor)?;
    let payload = json!({
        "mean_yield": num(run.mean_yield),
        "yield_rate": num(run.mean_yield / a.n as f64),
        "binary_entropy": num(binary_entropy(a.p)),
        "trials": a.trials,
    });
    if !a.samples {
        return Ok(Output::object(payload));
    }
    let mut t = Table::new(&["trial", "weight", "yield"]);
    for (i, (&k, &y)) in run.weights.iter().zip(&run.yields).enumerate() {
        t.push(vec![json!(i), json!(k), num(y)]);
    }
    let mut out = Output::table(t);
    let rows = out.payload["rows"].take();
    out.payload = payload;
    out.payload["rows"] = rows;
    Ok(out)
}

fn dispatch(cmd: &Command) -> (&'static str, Value, CmdResult) {
    fn params<T: Serialize>(t: &T) -> Value {
        serde_json::to_value(t).unwrap_or(Value::Null)
    }
    match cmd {
        Command::Analyze(a) => ("analyze", params(a), analyze(a)),
        Command::Smooth(a) => ("smooth", params(a), smooth(a)),
        Command::Power(a) => ("power", params(a), power(a)),
        Command::DilutionCurve(a) => ("dilution-curve", params(a), dilution(a)),
        Command::CapacityTable(a) => ("capacity-table", params(a), capacity(a)),
        Command::Embezzle(a) => ("embezzle", params(a), embezzle(a)),
        Command::EntanglingPower(a) => ("entangling-power", params(a), entangling(a)),
        Command::Uf(a) => ("uf", params(a), uf(a)),
        Command::Qrst(a) => ("qrst", params(a), qrst(a)),
        Command::SuperposeDemo(a) => ("superpose-demo", params(a), superpose(a)),
        Command::Concentrate(a) => ("concentrate", params(a), concentrate(a)),
    }
}

/// Parses `args` (program name first), runs the subcommand and writes the
/// result. Returns the process exit code: 0 on success, 1 for errors raised
/// by the analysis, 2 for usage errors.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return if code == 0 { 0 } else { 2 };
        }
    };
    let digits = cli.precision as usize;
    let (name, parameters, result) = dispatch(&cli.command);
    let rendered = result.and_then(|o| match cli.format {
        Format::Json => Ok(render_json(name, parameters, &o.payload, digits)),
        Format::Csv => match &o.table {
            Some(t) => Ok(render_csv(t, digits)),
            None => Err(Failure::Usage(format!("`{name}` has no tabular payload for --format csv"))),
        },
    });
    match rendered {
        Ok(text) => {
            if out.write_all(text.as_bytes()).is_err() {
                return 1;
            }
            0
        }
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
        Err(Failure::Domain(e)) => {
            let _ = writeln!(err, "error: {e:#}");
            1
        }
    }
}
