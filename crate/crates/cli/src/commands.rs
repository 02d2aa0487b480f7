use std::path::Path;

use vqrd::channels::{self, MemoryInstance};
use vqrd::coherence::{self, CoherenceInstance};
use vqrd::combs;
use vqrd::entanglement::{self, EntanglementInstance};
use vqrd::magic::{self, MagicInstance, MagicTarget};
use vqrd::qcore::io::OperatorFile;
use vqrd::qcore::{linalg, objects, DensityMatrix, HermitianOperator};
use vqrd::sampler::{self, EstimatorReport, QuasiDecomposition};
use vqrd::{Result, VqrdError};

use crate::output::{Cell, Table};
use crate::presets::{self, ChannelClosed, EntanglementClosed, Preset};
use crate::{FigureKind, Method, OverheadArgs, SampleArgs, Theory};

/// An input given either as a preset or as an operator file.
enum Source<'a> {
    Preset(Preset),
    File(&'a Path),
}

impl<'a> Source<'a> {
    fn new(preset: Option<&str>, input: Option<&'a Path>) -> Result<Self> {
        match (preset, input) {
            (Some(p), None) => Ok(Source::Preset(Preset::parse(p)?)),
            (None, Some(path)) => Ok(Source::File(path)),
            _ => Err(VqrdError::InvalidInput("give exactly one of --preset and --input".into())),
        }
    }

    fn state(&self, from_preset: impl FnOnce(&Preset) -> Result<DensityMatrix>) -> Result<DensityMatrix> {
        match self {
            Source::Preset(p) => from_preset(p),
            Source::File(path) => OperatorFile::read(path)?.to_state(),
        }
    }
}

/// Maps an infeasible program to an infinite overhead.
fn or_infinite(r: Result<f64>) -> Result<f64> {
    match r {
        Err(VqrdError::Infeasible(_)) | Err(VqrdError::NotInvertible(_)) => Ok(f64::INFINITY),
        other => other,
    }
}

/// Values of one overhead run, `closed` kept apart for the gap column.
struct Values {
    sdp: Vec<(&'static str, f64)>,
    closed: Option<f64>,
}

fn closed_needed(method: Method) -> bool {
    matches!(method, Method::Closed | Method::Both)
}

fn sdp_needed(method: Method) -> bool {
    matches!(method, Method::Sdp | Method::Both)
}

fn no_closed_form(what: &str) -> VqrdError {
    VqrdError::Unsupported(format!("no closed form for {what}"))
}

pub fn overhead(args: &OverheadArgs) -> Result<Table> {
    let source = Source::new(args.preset.as_deref(), args.input.as_deref())?;
    let method = args.method.unwrap_or(if args.theory == Theory::Comb { Method::Closed } else { Method::Sdp });
    let (m, eps) = (args.m, args.eps);
    let values = match args.theory {
        Theory::Coherence => {
            let state = source.state(presets::coherence_state)?;
            let sdp = if sdp_needed(method) {
                let inst = CoherenceInstance::new(state.clone(), m, eps)?;
                vec![("sdp", or_infinite(coherence::mio_dio_overhead(&inst).map(|s| s.value))?)]
            } else {
                vec![]
            };
            let closed = if closed_needed(method) {
                if state.dim() != 2 {
                    return Err(no_closed_form("coherence inputs beyond a qubit"));
                }
                Some(coherence::single_qubit_overhead(&state, m, eps)?)
            } else {
                None
            };
            Values { sdp, closed }
        }
        Theory::Entanglement => {
            let (state, dims, known) = match &source {
                Source::Preset(p) => {
                    let e = presets::entanglement_state(p)?;
                    (e.state, e.dims, e.closed)
                }
                Source::File(path) => {
                    let state = OperatorFile::read(path)?.to_state()?;
                    (state.clone(), parse_dims(args.dims.as_deref(), state.dim())?, EntanglementClosed::None)
                }
            };
            let sdp = if sdp_needed(method) {
                let inst = EntanglementInstance::new(state, dims, m, eps)?;
                vec![("sdp", or_infinite(entanglement::ppt_overhead_exact(&inst).map(|s| s.value))?)]
            } else {
                vec![]
            };
            let closed = if closed_needed(method) {
                Some(match known {
                    EntanglementClosed::Isotropic { alpha, k } => entanglement::isotropic_overhead(alpha, k, m, eps)?,
                    EntanglementClosed::Pure(s) => entanglement::pure_state_overhead(&s, m, eps)?,
                    EntanglementClosed::None => return Err(no_closed_form("this entanglement input")),
                })
            } else {
                None
            };
            Values { sdp, closed }
        }
        Theory::Magic => {
            let (state, bloch) = match &source {
                Source::Preset(p) => {
                    let mi = presets::magic_state(p)?;
                    (mi.state, mi.bloch)
                }
                Source::File(path) => (OperatorFile::read(path)?.to_state()?, None),
            };
            let target = match state.dim() {
                2 => MagicTarget::T,
                3 => MagicTarget::Strange,
                d => return Err(VqrdError::Unsupported(format!("no magic target for dimension {d}"))),
            };
            let sdp = if !sdp_needed(method) {
                vec![]
            } else if target == MagicTarget::Strange {
                MagicInstance::new(state.clone(), target, m, eps)?;
                vec![("lp", magic::strange_overhead(&state, eps)?)]
            } else {
                let r = magic::stabilizer_overhead_lp(&MagicInstance::new(state.clone(), target, m, eps)?)?;
                vec![("lp_lower", r.lower), ("lp_upper", r.upper)]
            };
            let closed = if closed_needed(method) {
                match (bloch, m) {
                    (Some(p), 1) => Some(magic::dephased_t_overhead(p, eps)?),
                    _ => return Err(no_closed_form("this magic input (dephased T states at m = 1 only)")),
                }
            } else {
                None
            };
            Values { sdp, closed }
        }
        Theory::Channel => {
            let (channel, known) = match &source {
                Source::Preset(p) => {
                    let c = presets::channel(p)?;
                    (c.channel, c.closed)
                }
                Source::File(path) => (OperatorFile::read(path)?.to_choi()?, ChannelClosed::None),
            };
            let sdp = if sdp_needed(method) {
                let inst = MemoryInstance::new(channel, m, eps)?;
                vec![("sdp", or_infinite(channels::memory_overhead_sdp(&inst).map(|s| s.value))?)]
            } else {
                vec![]
            };
            let closed = if closed_needed(method) {
                if m != 1 || eps != 0.0 {
                    return Err(no_closed_form("channels beyond m = 1, eps = 0"));
                }
                Some(or_infinite(match known {
                    ChannelClosed::Depolarizing { d, p } => channels::depolarizing_inverse_overhead(d, p),
                    ChannelClosed::Dephasing(p) => channels::dephasing_inverse_overhead(p),
                    ChannelClosed::AmplitudeDamping(g) => channels::amplitude_damping_inverse_overhead(g),
                    ChannelClosed::Identity => Ok(1.0),
                    ChannelClosed::None => return Err(no_closed_form("this channel")),
                })?)
            } else {
                None
            };
            Values { sdp, closed }
        }
        Theory::Comb => {
            let Source::Preset(p) = &source else {
                return Err(VqrdError::Unsupported("comb overheads are available for the dephasing preset only".into()));
            };
            if sdp_needed(method) {
                return Err(VqrdError::Unsupported("comb overheads have no SDP; use --method closed".into()));
            }
            if m != 1 || eps != 0.0 {
                return Err(VqrdError::Unsupported("comb overheads are computed at m = 1, eps = 0".into()));
            }
            let (l, q) = presets::comb(p)?;
            let v = combs::verify_decomposition(&combs::virtual_comb_decomposition(l, q)?)?;
            Values { sdp: vec![], closed: Some(v.sum_abs) }
        }
    };

    let instance = match &source {
        Source::Preset(_) => args.preset.clone().unwrap_or_default(),
        Source::File(path) => path.display().to_string(),
    };
    let theory = args.theory.name();
    let mut t = Table::new(vec!["theory", "instance", "m", "eps", "method", "value", "gap"]);
    let row = |method: &str, value: f64, gap: Cell| {
        vec![Cell::Text(theory.into()), Cell::Text(instance.clone()), Cell::Int(m as u64), Cell::Num(eps), Cell::Text(method.into()), Cell::Num(value), gap]
    };
    for &(name, v) in &values.sdp {
        let gap = match values.closed {
            Some(c) if method == Method::Both => Cell::Num(if v.is_infinite() && c.is_infinite() { 0.0 } else { (v - c).abs() }),
            _ => Cell::Empty,
        };
        t.push(row(name, v, gap));
    }
    if let Some(c) = values.closed {
        let name = if args.theory == Theory::Comb { "decomposition" } else { "closed" };
        t.push(row(name, c, Cell::Empty));
    }
    Ok(t)
}

fn parse_dims(text: Option<&str>, n: usize) -> Result<(usize, usize)> {
    let dims = match text {
        Some(s) => {
            let (a, b) = s.split_once(['x', 'X']).ok_or_else(|| VqrdError::InvalidInput(format!("--dims `{s}` is not AxB")))?;
            let parse = |v: &str| v.trim().parse::<usize>().map_err(|_| VqrdError::InvalidInput(format!("--dims `{s}` is not AxB")));
            (parse(a)?, parse(b)?)
        }
        None => {
            let r = (n as f64).sqrt().round() as usize;
            (r, r)
        }
    };
    if dims.0 * dims.1 != n {
        return Err(VqrdError::DimensionMismatch(format!("dims {dims:?} do not multiply to {n}")));
    }
    Ok(dims)
}

pub fn figure(kind: FigureKind, eps: f64, points: Option<usize>, steps: &[usize], ps: &[f64]) -> Result<Table> {
    match kind {
        FigureKind::Fig2 => {
            let mut t = Table::new(vec!["family", "noise_param", "overhead"]);
            for r in channels::fig2_data(eps, points.unwrap_or(21))? {
                t.push(vec![Cell::Text(r.family.name().into()), Cell::Num(r.noise_param), Cell::Num(r.overhead)]);
            }
            Ok(t)
        }
        FigureKind::Fig3 => {
            let mut t = Table::new(vec!["gamma", "v_lower", "capacity"]);
            for r in channels::fig3_data(points.unwrap_or(101))? {
                t.push(vec![Cell::Num(r.gamma), Cell::Num(r.v_lower), Cell::Num(r.capacity)]);
            }
            Ok(t)
        }
        FigureKind::Comb => {
            let mut t = Table::new(vec!["L", "p", "terms", "sum_abs", "residual"]);
            for &l in steps {
                for &p in ps {
                    let d = combs::virtual_comb_decomposition(l, p)?;
                    let v = combs::verify_decomposition(&d)?;
                    t.push(vec![Cell::Int(l as u64), Cell::Num(p), Cell::Int(d.terms.len() as u64), Cell::Num(v.sum_abs), Cell::Num(v.max_residual)]);
                }
            }
            Ok(t)
        }
    }
}

/// Decomposition, input state and observable of a sampling preset.
pub struct SampleSetup {
    pub decomposition: QuasiDecomposition,
    pub input: DensityMatrix,
    pub observable: HermitianOperator,
}

/// `X/2` on the last qubit of an n-qubit register.
fn x_half_on_last(qubits: usize) -> HermitianOperator {
    let rest = linalg::eye(1 << (qubits - 1));
    HermitianOperator::hermitian_part_of(&linalg::kron(&rest, &(objects::pauli_x() * linalg::cr(0.5))))
}

pub fn sample_setup(preset: &str) -> Result<SampleSetup> {
    let p = Preset::parse(preset)?;
    match p.name.as_str() {
        // |+⟩ from a coherent qubit with the one-copy X/Z protocol.
        "coherence" => {
            let input = presets::qubit(p.get("a", 0.5), p.get("beta", 0.25))?;
            Ok(SampleSetup {
                decomposition: coherence::one_qubit_decomposition(&input, p.get("eps", 0.0))?,
                input,
                observable: x_half_on_last(1),
            })
        }
        // Every open input in |+⟩, X/2 on the final environment.
        "comb" => {
            let (l, q) = (p.usize("l", 1)?, p.require("p")?);
            let decomposition = combs::virtual_comb_decomposition(l, q)?.quasi()?;
            Ok(SampleSetup { decomposition, input: objects::plus_power(l + 1), observable: x_half_on_last(l + 1) })
        }
        // Undo a noisy memory holding |+⟩ with the optimal correction.
        name if name.starts_with("inverse-") => {
            let memory = presets::channel(&Preset::parse(&preset[preset.find('-').expect("prefix checked") + 1..])?)?.channel;
            let sol = channels::memory_overhead_sdp(&MemoryInstance::new(memory.clone(), 1, 0.0)?)?;
            Ok(SampleSetup {
                decomposition: channels::memory_decomposition(&sol, 1)?,
                input: memory.apply_state(&objects::plus_state())?,
                observable: x_half_on_last(1),
            })
        }
        _ => Err(VqrdError::InvalidInput(format!("unknown sample preset `{}`", p.name))),
    }
}

pub fn sample(args: &SampleArgs) -> Result<EstimatorReport> {
    let s = sample_setup(&args.preset)?;
    let n = match (args.n, args.beta, args.delta) {
        (Some(n), None, None) => n,
        (None, Some(beta), Some(delta)) => sampler::sample_complexity(s.decomposition.gamma(), beta, delta, s.decomposition.m())?,
        _ => return Err(VqrdError::InvalidInput("give either --n or both --beta and --delta".into())),
    };
    if n == 0 {
        return Err(VqrdError::OutOfRange("need at least one sample".into()));
    }
    sampler::estimate_expectation(&s.decomposition, &s.input, &s.observable, n as usize, args.seed)
}
