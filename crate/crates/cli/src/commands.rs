use std::path::Path;

use anyhow::{bail, Context, Result};
use pathboltz::circuits::{
    bitstring, emit_circuit, parse_circuit, parse_circuit_json, probabilities, sample,
    serialize_circuit, serialize_circuit_json, CircuitDescription,
};
use pathboltz::entropy::{
    bethe_breakdown, kikuchi_breakdown, paper_chain_breakdown, EntropyBreakdown, ProbabilityTable,
    SimplicialComplex,
};
use pathboltz::layered_network::{boltzmann_joint, LayeredNetwork};
use pathboltz::operators::{
    matrix_from_csv_str, matrix_to_csv_string, ComplexMatrix, EvolutionParameter, HermitianOperator,
};
use pathboltz::path_integral::{amplitude_by_contraction, build_chain, partition_function, trotter_error};
use pathboltz::rbm::{gibbs_sample, gibbs_table, RbmParams, SpinConfiguration};
use pathboltz::rng::split_seed;
use pathboltz::trainer::{fit, FitConfig, GradientMode, LossKind, Optimizer, TrainingSet};

use crate::manifest::Inputs;
use crate::{
    Artifacts, CircuitAction, CircuitArgs, CircuitFormat, EntropyArgs, EntropyMode, Evolution,
    OptimizerKind, PartitionArgs, PropagateArgs, RbmArgs, TrainArgs, TrotterArgs,
};

// fixed sub-seed streams, one per seeded consumer
const STREAM_GIBBS: u64 = 0;
const STREAM_TRAIN: u64 = 1;
const STREAM_SHOTS: u64 = 2;

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn hamiltonian(e: &Evolution, inputs: &mut Inputs) -> Result<(HermitianOperator<f64>, EvolutionParameter<f64>)> {
    let text = inputs.read(&e.hamiltonian)?;
    let m = matrix_from_csv_str(&text).with_context(|| format!("in {}", e.hamiltonian.display()))?;
    let h = HermitianOperator::new(m).with_context(|| format!("in {}", e.hamiltonian.display()))?;
    let beta = if e.real_time {
        EvolutionParameter::real_time(e.beta)?
    } else {
        EvolutionParameter::thermal(e.beta)?
    };
    Ok((h, beta))
}

fn network(path: &Path, inputs: &mut Inputs) -> Result<LayeredNetwork<f64>> {
    let text = inputs.read(path)?;
    LayeredNetwork::from_json(&text).with_context(|| format!("in {}", path.display()))
}

pub fn propagate(a: &PropagateArgs, inputs: &mut Inputs) -> Result<Artifacts> {
    let (h, beta) = hamiltonian(&a.evolution, inputs)?;
    let chain = build_chain(&h, &beta, a.slices, a.scheme)?;
    let main = match (a.start, a.end) {
        (Some(start), Some(end)) => {
            let amp = amplitude_by_contraction(&chain, start, end)?;
            csv_text(
                &["start", "end", "re", "im"],
                [vec![start.to_string(), end.to_string(), amp.re.to_string(), amp.im.to_string()]],
            )?
        }
        _ => matrix_to_csv_string(&chain.contract()),
    };
    let mut artifacts = Artifacts::main(main);
    if let Some(dump) = &a.dump {
        artifacts.extra.push((dump.clone(), serde_json::to_string_pretty(&chain.to_dump())? + "\n"));
    }
    Ok(artifacts)
}

pub fn partition(a: &PartitionArgs, inputs: &mut Inputs) -> Result<Artifacts> {
    let (h, beta) = hamiltonian(&a.evolution, inputs)?;
    let z = partition_function(&h, &beta)?;
    let line = if z.im == 0.0 {
        format!("Z = {}\n", z.re)
    } else {
        format!("Z = {} {:+}i\n", z.re, z.im)
    };
    Ok(Artifacts::main(line))
}

pub fn trotter(a: &TrotterArgs, inputs: &mut Inputs) -> Result<Artifacts> {
    let (h, beta) = hamiltonian(&a.evolution, inputs)?;
    let mut rows = Vec::with_capacity(a.slices.len());
    let mut previous: Option<f64> = None;
    for &p in &a.slices {
        let err = trotter_error(&h, &beta, p, a.scheme)?;
        let ratio = previous.map(|e| (e / err).to_string()).unwrap_or_default();
        rows.push(vec![p.to_string(), err.to_string(), ratio]);
        previous = Some(err);
    }
    Ok(Artifacts::main(csv_text(&["P", "error", "ratio"], rows)?))
}

pub fn rbm(a: &RbmArgs, inputs: &mut Inputs) -> Result<Artifacts> {
    let text = inputs.read(&a.spec)?;
    let params = RbmParams::<f64>::from_json(&text).with_context(|| format!("in {}", a.spec.display()))?;
    let table = if a.exact {
        gibbs_table(&params)?
    } else {
        gibbs_sample(&params, a.sweeps, a.burn_in, split_seed(a.seed, STREAM_GIBBS))?
    };
    let hidden = 1usize << params.p;
    let rows = table.masses().iter().enumerate().map(|(k, m)| {
        vec![
            SpinConfiguration::from_index(k / hidden, params.n).signs(),
            SpinConfiguration::from_index(k % hidden, params.p).signs(),
            m.to_string(),
        ]
    });
    Ok(Artifacts::main(csv_text(&["v", "h", "probability"], rows)?))
}

/// Adjacent layer pairs plus the layer sets of every k-local weight.
fn network_complex(net: &LayeredNetwork<f64>) -> Result<SimplicialComplex> {
    let layers = net.layers().len();
    let mut generators: Vec<Vec<usize>> = (0..layers.saturating_sub(1)).map(|i| vec![i, i + 1]).collect();
    if layers == 1 {
        generators.push(vec![0]);
    }
    generators.extend(net.higher().iter().map(|h| h.layers.clone()));
    Ok(SimplicialComplex::from_simplices(generators)?)
}

fn breakdown_csv(b: &EntropyBreakdown<f64>) -> Result<String> {
    let mut rows: Vec<Vec<String>> = b
        .terms
        .iter()
        .map(|t| vec![t.term.clone(), t.coefficient.to_string(), t.entropy.to_string(), t.contribution.to_string()])
        .collect();
    rows.push(vec!["total".into(), String::new(), String::new(), b.total.to_string()]);
    csv_text(&["term", "coefficient", "entropy", "contribution"], rows)
}

pub fn entropy(a: &EntropyArgs, inputs: &mut Inputs) -> Result<Artifacts> {
    let net = network(&a.network, inputs)?;
    let joint = boltzmann_joint(&net)?;
    let breakdown = match a.mode {
        EntropyMode::Paper => paper_chain_breakdown(&joint)?,
        EntropyMode::Bethe => {
            let edges: Vec<(usize, usize)> = (0..net.layers().len().saturating_sub(1)).map(|i| (i, i + 1)).collect();
            bethe_breakdown(&joint, &edges)?
        }
        EntropyMode::Kikuchi => {
            let complex = network_complex(&net)?.with_multiplicities(a.multiplicity);
            kikuchi_breakdown(&joint, &complex)?
        }
    };
    Ok(Artifacts::main(breakdown_csv(&breakdown)?))
}

fn read_pairs(text: &str, net: &LayeredNetwork<f64>) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    let dims = net.dims();
    let (din, dout) = (dims[0], dims[dims.len() - 1]);
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut pairs = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != din + dout {
            bail!(pathboltz::Error::Parse {
                line: line as usize,
                message: format!("expected {} values ({din} inputs, {dout} targets), found {}", din + dout, record.len()),
            });
        }
        let values = record
            .iter()
            .enumerate()
            .map(|(field, v)| {
                v.parse::<f64>().map_err(|_| pathboltz::Error::Parse {
                    line: line as usize,
                    message: format!("field {} `{v}` is not a number", field + 1),
                })
            })
            .collect::<std::result::Result<Vec<f64>, _>>()?;
        pairs.push((values[..din].to_vec(), values[din..].to_vec()));
    }
    if pairs.is_empty() {
        bail!(pathboltz::Error::InvalidConfig("training data has no rows".into()));
    }
    Ok(pairs)
}

pub fn train(a: &TrainArgs, inputs: &mut Inputs) -> Result<Artifacts> {
    let net = network(&a.network, inputs)?;
    let data = if let Some(path) = &a.data {
        TrainingSet::MapPairs(read_pairs(&inputs.read(path)?, &net).with_context(|| format!("in {}", path.display()))?)
    } else if let Some(path) = &a.propagator {
        let m: ComplexMatrix<f64> = matrix_from_csv_str(&inputs.read(path)?).with_context(|| format!("in {}", path.display()))?;
        TrainingSet::TargetPropagator(m)
    } else if let Some(path) = &a.gibbs {
        TrainingSet::TargetGibbs(ProbabilityTable::from_json(&inputs.read(path)?).with_context(|| format!("in {}", path.display()))?)
    } else {
        unreachable!("clap requires one target")
    };
    let loss = a.loss.unwrap_or(match data {
        TrainingSet::TargetGibbs(_) => LossKind::KullbackLeibler,
        _ => LossKind::SquaredError,
    });
    let optimizer = match a.opt {
        OptimizerKind::Adam => Optimizer::adam(a.lr),
        OptimizerKind::Gd => Optimizer::GradientDescent { lr: a.lr },
    };
    let mut cfg = FitConfig::new(loss, optimizer, a.steps, split_seed(a.seed, STREAM_TRAIN));
    cfg.activation = a.activation;
    cfg.reinitialize = a.reinitialize;
    if let Some(h) = a.numeric_gradient {
        cfg.gradient = GradientMode::CentralDifference(h);
    }
    cfg.validate()?;

    let result = fit(&net, &data, &cfg)?;
    let mut artifacts = Artifacts::main(result.network.to_json()? + "\n");
    if let Some(trace) = &a.trace {
        let rows = result.trace.iter().enumerate().map(|(i, l)| vec![i.to_string(), l.to_string()]);
        artifacts.extra.push((trace.clone(), csv_text(&["step", "loss"], rows)?));
    }
    Ok(artifacts)
}

fn load_circuit(a: &CircuitArgs, inputs: &mut Inputs) -> Result<CircuitDescription<f64>> {
    if let Some(path) = &a.circuit {
        let text = inputs.read(path)?;
        let parsed = if text.trim_start().starts_with('{') {
            parse_circuit_json(&text)
        } else {
            parse_circuit(&text)
        };
        return parsed.with_context(|| format!("in {}", path.display()));
    }
    let path = a.network.as_ref().expect("clap requires a source");
    let time = a.time.expect("clap requires --time with --network");
    Ok(emit_circuit(&network(path, inputs)?, time)?)
}

pub fn circuit(a: &CircuitArgs, inputs: &mut Inputs) -> Result<Artifacts> {
    let circuit = load_circuit(a, inputs)?;
    let n = circuit.num_qubits();
    let main = match a.action {
        CircuitAction::Emit => match a.format {
            CircuitFormat::Text => serialize_circuit(&circuit),
            CircuitFormat::Json => serialize_circuit_json(&circuit)? + "\n",
        },
        CircuitAction::Sim => {
            let probs = probabilities(&circuit)?;
            match a.shots {
                Some(shots) => {
                    let counts = sample(&circuit, shots, split_seed(a.seed, STREAM_SHOTS))?;
                    let rows = counts.iter().map(|(&k, &c)| {
                        vec![bitstring(k, n), c.to_string(), (c as f64 / shots as f64).to_string(), probs[k].to_string()]
                    });
                    csv_text(&["bitstring", "count", "frequency", "probability"], rows)?
                }
                None => {
                    let rows = probs
                        .iter()
                        .enumerate()
                        .filter(|(_, &p)| p > 0.0)
                        .map(|(k, p)| vec![bitstring(k, n), p.to_string()]);
                    csv_text(&["bitstring", "probability"], rows)?
                }
            }
        }
    };
    Ok(Artifacts::main(main))
}
