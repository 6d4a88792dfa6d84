use std::collections::BTreeSet;
use std::fs;

use anyhow::{bail, ensure, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use num_traits::{One, Signed, Zero};

use lipfree::d2p::{
    ld2p_certificate, lip_ltp_witness, sd2p_certificate, two_lip_ltp_witness, verify_lip_ltp, LipLtpWitness,
};
use lipfree::example52::{core_points, default_battery, epsilon, fixture_function, DEFAULT_SEED};
use lipfree::functionals::{dual_norm, is_optimal, OptimalityVerdict};
use lipfree::io::{parse_number, FunctionFile, MeasureFile, MetricFile, PairsFile};
use lipfree::lipschitz::lip_norm;
use lipfree::metric::{build_example52, validate_metric, ValidationReport};
use lipfree::monotone::{prune_to_cm, replay_witness, synthesize_witness};
use lipfree::{apply, check_gamma_cm, positivize, slice_diameter, slope, CmVerdict, Gamma, PairMeasure, Rational};

use crate::input;
use crate::report::*;

#[derive(Parser, Debug)]
#[command(name = "lipfree", version, about = "Exact certificates for Lipschitz-free spaces over finite metrics")]
pub struct Cli {
    /// Output format of the report.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Worker threads for parallel scans (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Add wall-clock time to the report (outside the certificate body).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Part {
    #[value(name = "w-d2p")]
    WD2p,
    Ld2p,
    All,
}

/// A metric is a JSON file or a builtin (`example52:J`, `line:n`).
#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the metric axioms.
    Validate { metric: String },
    /// Decide γ-cyclic monotonicity of a pair set.
    CheckCm {
        #[arg(long)]
        gamma: String,
        #[arg(long)]
        pairs: String,
        metric: String,
    },
    /// A unit-ball function with slope at least γ on every pair, if one exists.
    Witness {
        #[arg(long)]
        gamma: String,
        #[arg(long)]
        pairs: String,
        metric: String,
    },
    /// Dual norm of the functional induced by a measure, by exact LP.
    Norm {
        measure: String,
        #[arg(long)]
        metric: String,
    },
    /// Decide whether a positive measure is optimal.
    Optimal {
        measure: String,
        #[arg(long)]
        metric: String,
    },
    /// A positive measure inducing the same functional with the same total variation.
    Positivize {
        measure: String,
        #[arg(long)]
        metric: String,
    },
    /// Supremal diameter of the slice of the unit ball cut out by a measure.
    SliceDiam {
        #[arg(long)]
        alpha: String,
        /// Scale the measure to norm one first.
        #[arg(long)]
        normalize: bool,
        measure: String,
        #[arg(long)]
        metric: String,
    },
    /// Search a pair (u, v) satisfying the Lipschitz long-trajectory inequalities.
    LipLtp {
        #[arg(long)]
        eps: String,
        #[arg(long)]
        subset: String,
        #[arg(long)]
        function: String,
        metric: String,
    },
    /// Search a pair (u, v) both of whose augmentations stay (1-ε)-monotone.
    TwoLipLtp {
        #[arg(long)]
        eps: String,
        #[arg(long)]
        pairs: String,
        metric: String,
    },
    /// Search a local diameter-two certificate for an optimal measure.
    Ld2pCert {
        #[arg(long)]
        gamma: String,
        measure: String,
        #[arg(long)]
        metric: String,
    },
    /// Search a common diameter-two certificate for several optimal measures.
    Sd2pCert {
        #[arg(long)]
        gamma: String,
        #[arg(required = true)]
        measures: Vec<String>,
        #[arg(long)]
        metric: String,
    },
    /// Prune a γ-monotone pair set to a cyclically monotonic subset.
    PruneCm {
        #[arg(long)]
        gamma: String,
        #[arg(long)]
        bound: u32,
        #[arg(long)]
        pairs: String,
        measure: String,
        #[arg(long)]
        metric: String,
    },
    /// Reproduce the bundled example space.
    Example52 {
        #[arg(long)]
        levels: usize,
        #[arg(long, value_enum)]
        part: Part,
        /// Values of γ for the LD2P battery.
        #[arg(long = "gamma", default_values_t = ["1/2".to_owned(), "9/10".to_owned()])]
        gammas: Vec<String>,
    },
    /// Replay a JSON report without searching.
    Verify { report: String },
}

fn number(text: &str) -> Result<Rational> {
    Ok(parse_number(text)?)
}

fn gamma_of(text: &str) -> Result<Gamma<Rational>> {
    Ok(Gamma::new(number(text)?)?)
}

fn measures_of(space: &Space, files: &[MeasureFile]) -> Result<Vec<PairMeasure<Rational>>> {
    files.iter().map(|m| Ok(m.to_measure(space)?)).collect()
}

fn measure_of(space: &Space, inputs: &Inputs) -> Result<PairMeasure<Rational>> {
    match inputs.measures.as_slice() {
        [m] => Ok(m.to_measure(space)?),
        _ => bail!("expected exactly one measure"),
    }
}

fn loaded(metric: &str) -> Result<(Inputs, Space)> {
    let file = input::metric(metric)?;
    let space = file.to_space()?;
    Ok((
        Inputs {
            metric: Some(file),
            ..Inputs::default()
        },
        space,
    ))
}

/// The α with γ² = 1 - α/2, used for the battery's slice diameters.
fn battery_alpha(gamma: &Rational) -> Rational {
    let two = Rational::from_integer(2.into());
    two * (Rational::one() - gamma.clone() * gamma.clone())
}

fn seed() -> Result<u64> {
    match std::env::var("LIPFREE_SEED") {
        Ok(s) => s.trim().parse().with_context(|| format!("LIPFREE_SEED=`{s}` is not an integer")),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

pub fn execute(command: &Command, argv: Vec<String>) -> Result<Report> {
    let (inputs, verdict, payload) = match command {
        Command::Validate { metric } => {
            let (inputs, space) = loaded(metric)?;
            let violation = match validate_metric(&space) {
                ValidationReport::Valid => None,
                ValidationReport::Violation(v) => Some(v.to_string()),
            };
            let verdict = if violation.is_none() { Verdict::Holds } else { Verdict::Refuted };
            (inputs, verdict, Payload::Validate { violation })
        }
        Command::CheckCm { gamma, pairs, metric } | Command::Witness { gamma, pairs, metric } => {
            let (mut inputs, space) = loaded(metric)?;
            inputs.pairs = Some(input::pairs(pairs)?);
            let set = inputs.pair_set(&space)?;
            let g = gamma_of(gamma)?;
            inputs.gammas = vec![num(g.value())];
            let cm = check_gamma_cm(&space, &set, &g);
            let verdict = if cm.is_monotone() { Verdict::Holds } else { Verdict::Refuted };
            let dto = cm_verdict_dto(&space, &set, &cm);
            let payload = if matches!(command, Command::Witness { .. }) {
                let function = match &cm {
                    CmVerdict::Monotone(c) => Some(FunctionFile::from_function(
                        &space,
                        &synthesize_witness(&space, &set, &g, c)?,
                    )),
                    CmVerdict::Violated(_) => None,
                };
                Payload::Witness { verdict: dto, function }
            } else {
                Payload::CheckCm { verdict: dto }
            };
            (inputs, verdict, payload)
        }
        Command::Norm { measure, metric } => {
            let (mut inputs, space) = loaded(metric)?;
            inputs.measures = vec![input::measure(measure)?];
            let mu = measure_of(&space, &inputs)?;
            let r = dual_norm(&space, &mu)?;
            let payload = Payload::Norm {
                norm: num(&r.norm),
                maximizer: FunctionFile::from_function(&space, &r.maximizer),
            };
            (inputs, Verdict::Computed, payload)
        }
        Command::Optimal { measure, metric } => {
            let (mut inputs, space) = loaded(metric)?;
            inputs.measures = vec![input::measure(measure)?];
            let mu = measure_of(&space, &inputs)?;
            let mass = num(&mu.total_variation());
            let support = mu.support();
            let (verdict, payload) = match is_optimal(&space, &mu)? {
                OptimalityVerdict::Optimal { certificate, norm } => {
                    let f = synthesize_witness(&space, &support, &Gamma::one(), &certificate)?;
                    let payload = Payload::Optimal {
                        norm: num(&norm),
                        mass,
                        verdict: cm_verdict_dto(&space, &support, &CmVerdict::Monotone(certificate)),
                        function: Some(FunctionFile::from_function(&space, &f)),
                    };
                    (Verdict::Holds, payload)
                }
                OptimalityVerdict::NotOptimal { violation, norm, .. } => {
                    let payload = Payload::Optimal {
                        norm: num(&norm),
                        mass,
                        verdict: cm_verdict_dto(&space, &support, &CmVerdict::Violated(violation)),
                        function: None,
                    };
                    (Verdict::Refuted, payload)
                }
            };
            (inputs, verdict, payload)
        }
        Command::Positivize { measure, metric } => {
            let (mut inputs, space) = loaded(metric)?;
            inputs.measures = vec![input::measure(measure)?];
            let nu = measure_of(&space, &inputs)?;
            let mu = positivize(&nu);
            let payload = Payload::Positivize {
                measure: MeasureFile::from_measure(&space, &mu),
                total_variation: num(&mu.total_variation()),
            };
            (inputs, Verdict::Computed, payload)
        }
        Command::SliceDiam {
            alpha,
            normalize,
            measure,
            metric,
        } => {
            let (mut inputs, space) = loaded(metric)?;
            inputs.measures = vec![input::measure(measure)?];
            let a = number(alpha)?;
            inputs.alpha = Some(num(&a));
            let mu = measure_of(&space, &inputs)?;
            let d = slice_diameter(&space, &mu, &a, *normalize)?;
            let payload = Payload::SliceDiam(SliceDto {
                alpha: num(&a),
                diameter: num(&d.diameter),
                pair: d.pair.map(|p| lipfree::io::pair_labels(&space, &p)),
                f: FunctionFile::from_function(&space, &d.f),
                g: FunctionFile::from_function(&space, &d.g),
                scale: num(&d.scale),
                pairs_examined: d.pairs_examined,
            });
            (inputs, Verdict::Computed, payload)
        }
        Command::LipLtp {
            eps,
            subset,
            function,
            metric,
        } => {
            let (mut inputs, space) = loaded(metric)?;
            let e = number(eps)?;
            inputs.epsilon = Some(num(&e));
            inputs.subset = Some(input::points(subset)?);
            inputs.function = Some(input::function(function)?);
            let n = inputs.subset.as_ref().expect("set above").to_points(&space)?;
            let f = inputs.function.as_ref().expect("set above").to_function(&space)?;
            let w = lip_ltp_witness(&space, &n, &e, &f)?;
            let verdict = if w.is_found() { Verdict::Holds } else { Verdict::Absent };
            (inputs, verdict, Payload::LipLtp(lip_ltp_dto(&space, &w)))
        }
        Command::TwoLipLtp { eps, pairs, metric } => {
            let (mut inputs, space) = loaded(metric)?;
            let e = number(eps)?;
            inputs.epsilon = Some(num(&e));
            inputs.pairs = Some(input::pairs(pairs)?);
            let set = inputs.pair_set(&space)?;
            let outcome = two_lip_ltp_witness(&space, &set, &e)?;
            let verdict = if outcome.is_found() { Verdict::Holds } else { Verdict::Absent };
            (inputs, verdict, Payload::TwoLipLtp(two_lip_ltp_dto(&space, &set, &outcome)))
        }
        Command::Ld2pCert { gamma, measure, metric } => {
            let (mut inputs, space) = loaded(metric)?;
            inputs.measures = vec![input::measure(measure)?];
            let g = gamma_of(gamma)?;
            inputs.gammas = vec![num(g.value())];
            let mu = measure_of(&space, &inputs)?;
            let outcome = ld2p_certificate(&space, &mu, &g)?;
            let verdict = if outcome.certificate().is_some() { Verdict::Holds } else { Verdict::Absent };
            (inputs, verdict, Payload::Ld2pCert(ld2p_dto(&space, &outcome)))
        }
        Command::Sd2pCert { gamma, measures, metric } => {
            let (mut inputs, space) = loaded(metric)?;
            inputs.measures = measures.iter().map(|m| input::measure(m)).collect::<Result<_>>()?;
            let g = gamma_of(gamma)?;
            inputs.gammas = vec![num(g.value())];
            let mus = measures_of(&space, &inputs.measures)?;
            let outcome = sd2p_certificate(&space, &mus, &g)?;
            let verdict = if outcome.certificate().is_some() { Verdict::Holds } else { Verdict::Absent };
            (inputs, verdict, Payload::Sd2pCert(sd2p_dto(&space, &outcome)))
        }
        Command::PruneCm {
            gamma,
            bound,
            pairs,
            measure,
            metric,
        } => {
            let (mut inputs, space) = loaded(metric)?;
            inputs.pairs = Some(input::pairs(pairs)?);
            inputs.measures = vec![input::measure(measure)?];
            inputs.bound = Some(*bound);
            let g = gamma_of(gamma)?;
            inputs.gammas = vec![num(g.value())];
            let set = inputs.pair_set(&space)?;
            let mu = measure_of(&space, &inputs)?;
            let pruned = prune_to_cm(&space, &set, &mu, &g, *bound)?;
            let payload = Payload::PruneCm(PruneDto {
                kept: PairsFile::from_pairs(&space, &pruned.kept),
                dropped: PairsFile::from_pairs(&space, &pruned.dropped),
                buckets: pruned.buckets,
                dropped_bucket: pruned.dropped_bucket,
                potentials: nums(&pruned.certificate.potentials),
                mass_kept: num(&mu.mass_of(&pruned.kept)),
                mass_bound: num(&prune_bound(&mu, &set, &g, *bound)),
            });
            (inputs, Verdict::Holds, payload)
        }
        Command::Example52 { levels, part, gammas } => example52(*levels, *part, gammas)?,
        Command::Verify { report } => {
            let text = fs::read_to_string(report).with_context(|| format!("cannot read {report}"))?;
            let original: Report = serde_json::from_str(&text).with_context(|| format!("malformed report {report}"))?;
            verify(&original)?;
            let payload = Payload::Verify {
                replayed: kind_name(&original.payload).to_owned(),
                verdict: original.verdict,
            };
            (original.inputs, Verdict::Holds, payload)
        }
    };
    Ok(Report::new(argv, inputs, verdict, payload))
}

/// `μ(A) - 2·bound·(1-γ)·μ(total)`.
fn prune_bound(mu: &PairMeasure<Rational>, set: &lipfree::PairSet, g: &Gamma<Rational>, bound: u32) -> Rational {
    let slack = Rational::from_integer((2 * i64::from(bound)).into()) * (Rational::one() - g.value().clone());
    mu.mass_of(set) - slack * mu.total_mass()
}

fn example52(levels: usize, part: Part, gammas: &[String]) -> Result<(Inputs, Verdict, Payload)> {
    let space = build_example52::<Rational>(levels)?;
    let mut inputs = Inputs {
        metric: Some(MetricFile::from_space(&space)),
        ..Inputs::default()
    };
    let mut dto = Example52Dto {
        levels,
        w_d2p: None,
        ld2p: None,
    };
    if matches!(part, Part::WD2p | Part::All) {
        let n = core_points(&space)?;
        let f = fixture_function(&space)?;
        let e: Rational = epsilon();
        inputs.subset = Some(subset_labels(&space, &n));
        inputs.function = Some(FunctionFile::from_function(&space, &f));
        inputs.epsilon = Some(num(&e));
        dto.w_d2p = Some(lip_ltp_dto(&space, &lip_ltp_witness(&space, &n, &e, &f)?));
    }
    if matches!(part, Part::Ld2p | Part::All) {
        let battery = default_battery(&space, levels, seed()?)?;
        let gs = gammas.iter().map(|g| gamma_of(g)).collect::<Result<Vec<_>>>()?;
        inputs.measures = battery.iter().map(|mu| MeasureFile::from_measure(&space, mu)).collect();
        inputs.gammas = gs.iter().map(|g| num(g.value())).collect();
        let mut entries = Vec::new();
        for g in &gs {
            let alpha = battery_alpha(g.value());
            for (i, mu) in battery.iter().enumerate() {
                let outcome = ld2p_certificate(&space, mu, g)?;
                let d = slice_diameter(&space, mu, &alpha, false)?;
                entries.push(BatteryEntry {
                    measure: i,
                    gamma: num(g.value()),
                    alpha: num(&alpha),
                    outcome: ld2p_dto(&space, &outcome),
                    slice_diameter: num(&d.diameter),
                });
            }
        }
        dto.ld2p = Some(entries);
    }
    let verdict = example52_verdict(&dto);
    Ok((inputs, verdict, Payload::Example52(dto)))
}

/// `w-d2p` alone: ABSENT when no pair satisfies the inequalities. `ld2p`
/// alone: holds when every battery entry is certified. Both: holds when
/// the reproduction succeeds on both halves, refuted otherwise.
fn example52_verdict(dto: &Example52Dto) -> Verdict {
    let absent = dto.w_d2p.as_ref().map(|w| w.found.is_none());
    let certified = dto
        .ld2p
        .as_ref()
        .map(|es| es.iter().all(|e| e.outcome.certificate.is_some()));
    match (absent, certified) {
        (Some(true), None) => Verdict::Absent,
        (Some(false), None) => Verdict::Holds,
        (None, Some(true)) => Verdict::Holds,
        (None, Some(false)) => Verdict::Absent,
        (Some(a), Some(c)) if a && c => Verdict::Holds,
        _ => Verdict::Refuted,
    }
}

pub fn kind_name(p: &Payload) -> &'static str {
    match p {
        Payload::Validate { .. } => "validate",
        Payload::CheckCm { .. } => "check-cm",
        Payload::Witness { .. } => "witness",
        Payload::Norm { .. } => "norm",
        Payload::Optimal { .. } => "optimal",
        Payload::Positivize { .. } => "positivize",
        Payload::SliceDiam(_) => "slice-diam",
        Payload::LipLtp(_) => "lip-ltp",
        Payload::TwoLipLtp(_) => "two-lip-ltp",
        Payload::Ld2pCert(_) => "ld2p-cert",
        Payload::Sd2pCert(_) => "sd2p-cert",
        Payload::PruneCm(_) => "prune-cm",
        Payload::Example52(_) => "example52",
        Payload::Verify { .. } => "verify",
    }
}

fn verdict_of(holds: bool, otherwise: Verdict) -> Verdict {
    if holds {
        Verdict::Holds
    } else {
        otherwise
    }
}

/// Replays a report: recomputes the inputs hash, checks the verdict
/// matches the payload, and re-checks every certificate, violation and
/// exhaustion log exactly.
pub fn verify(report: &Report) -> Result<()> {
    ensure!(report.inputs.sha256() == report.inputs_sha256, "inputs hash does not match");
    let inputs = &report.inputs;
    let expected = match &report.payload {
        Payload::Validate { violation } => {
            let space = inputs.space()?;
            let actual = match validate_metric(&space) {
                ValidationReport::Valid => None,
                ValidationReport::Violation(v) => Some(v.to_string()),
            };
            ensure!(actual == *violation, "metric validation differs");
            verdict_of(violation.is_none(), Verdict::Refuted)
        }
        Payload::CheckCm { verdict } | Payload::Witness { verdict, .. } => {
            let space = inputs.space()?;
            let set = inputs.pair_set(&space)?;
            let g = inputs.gamma()?;
            let cm = verdict.to_core()?;
            cm.verify(&space, &set, &g)?;
            if let Payload::Witness { function, .. } = &report.payload {
                ensure!(cm.is_monotone() == function.is_some(), "witness present iff monotone");
                if let Some(f) = function {
                    let f = f.to_function(&space)?;
                    replay_witness(&space, &set, &g, &f)?;
                }
            }
            verdict_of(cm.is_monotone(), Verdict::Refuted)
        }
        Payload::Norm { norm, maximizer } => {
            let space = inputs.space()?;
            let mu = measure_of(&space, inputs)?;
            let f = maximizer.to_function(&space)?;
            let value = number(norm)?;
            ensure!(lip_norm(&space, &f) <= Rational::one(), "maximizer is outside the unit ball");
            ensure!(apply(&space, &mu, &f) == value, "maximizer does not attain the norm");
            ensure!(dual_norm(&space, &mu)?.norm == value, "norm differs from the LP optimum");
            Verdict::Computed
        }
        Payload::Optimal {
            norm,
            mass,
            verdict,
            function,
        } => {
            let space = inputs.space()?;
            let mu = measure_of(&space, inputs)?;
            let support = mu.support();
            let cm = verdict.to_core()?;
            cm.verify(&space, &support, &Gamma::one())?;
            ensure!(number(mass)? == mu.total_variation(), "mass differs");
            let norm = number(norm)?;
            if cm.is_monotone() {
                let f = function.as_ref().context("optimal report without witness")?;
                let f = f.to_function(&space)?;
                replay_witness(&space, &support, &Gamma::one(), &f)?;
                ensure!(apply(&space, &mu, &f) == norm && norm == mu.total_variation(), "witness does not attain the mass");
            } else {
                ensure!(function.is_none(), "refuted report carries a witness");
                ensure!(dual_norm(&space, &mu)?.norm == norm && norm < mu.total_variation(), "norm gap does not replay");
            }
            verdict_of(cm.is_monotone(), Verdict::Refuted)
        }
        Payload::Positivize {
            measure,
            total_variation,
        } => {
            let space = inputs.space()?;
            let nu = measure_of(&space, inputs)?;
            let mu = measure.to_measure(&space)?;
            ensure!(mu.is_positive(), "result is not positive");
            ensure!(mu == positivize(&nu), "result differs from the positivization");
            ensure!(number(total_variation)? == nu.total_variation(), "total variation changed");
            Verdict::Computed
        }
        Payload::SliceDiam(s) => {
            let space = inputs.space()?;
            let mu = measure_of(&space, inputs)?.scaled(&number(&s.scale)?);
            let alpha = Inputs::number(&inputs.alpha, "alpha")?;
            ensure!(number(&s.alpha)? == alpha, "alpha differs");
            let level = Rational::one() - alpha;
            let f = s.f.to_function(&space)?;
            let g = s.g.to_function(&space)?;
            for h in [&f, &g] {
                ensure!(lip_norm(&space, h) <= Rational::one(), "slice member outside the unit ball");
                ensure!(apply(&space, &mu, h) >= level, "slice member outside the closed slice");
            }
            let d = number(&s.diameter)?;
            match &s.pair {
                Some([u, v]) => {
                    let p = space.pair(u, v)?;
                    ensure!(slope(&space, &f.sub(&g), &p) == d, "f - g does not attain the diameter");
                }
                None => ensure!(d.is_zero() && f == g, "no pair but nonzero diameter"),
            }
            Verdict::Computed
        }
        Payload::LipLtp(dto) => {
            let space = inputs.space()?;
            let w = dto.to_core(&space)?;
            verify_lip_ltp_inputs(&space, inputs, &w)?;
            verdict_of(w.is_found(), Verdict::Absent)
        }
        Payload::TwoLipLtp(dto) => {
            let space = inputs.space()?;
            let set = inputs.pair_set(&space)?;
            let outcome = dto.to_core(&space)?;
            outcome.verify(&space, &set, &Inputs::number(&inputs.epsilon, "epsilon")?)?;
            verdict_of(outcome.is_found(), Verdict::Absent)
        }
        Payload::Ld2pCert(dto) => {
            let space = inputs.space()?;
            let mu = measure_of(&space, inputs)?;
            let outcome = dto.to_core(&space)?;
            outcome.verify(&space, &mu, &inputs.gamma()?)?;
            verdict_of(outcome.certificate().is_some(), Verdict::Absent)
        }
        Payload::Sd2pCert(dto) => {
            let space = inputs.space()?;
            let mus = measures_of(&space, &inputs.measures)?;
            let outcome = dto.to_core(&space)?;
            outcome.verify(&space, &mus, &inputs.gamma()?)?;
            verdict_of(outcome.certificate().is_some(), Verdict::Absent)
        }
        Payload::PruneCm(p) => {
            let space = inputs.space()?;
            let set = inputs.pair_set(&space)?;
            let mu = measure_of(&space, inputs)?;
            let g = inputs.gamma()?;
            let bound = inputs.bound.context("report has no bound")?;
            let kept = p.kept.to_pairs(&space)?;
            let dropped = p.dropped.to_pairs(&space)?;
            ensure!(
                kept.iter().chain(dropped.iter()).copied().collect::<BTreeSet<_>>()
                    == set.iter().copied().collect::<BTreeSet<_>>()
                    && kept.len() + dropped.len() == set.len(),
                "kept and dropped do not partition the pair set"
            );
            let potentials = parse_nums(&p.potentials)?;
            ensure!(potentials.iter().all(|a| a.is_integer()), "potentials are not integers");
            lipfree::CmCertificate { potentials }.verify(&space, &kept, &Gamma::one())?;
            let bound_value = prune_bound(&mu, &set, &g, bound);
            ensure!(number(&p.mass_bound)? == bound_value, "mass bound differs");
            ensure!(number(&p.mass_kept)? == mu.mass_of(&kept) && mu.mass_of(&kept) >= bound_value, "kept mass below the bound");
            Verdict::Holds
        }
        Payload::Example52(e) => {
            let space = build_example52::<Rational>(e.levels)?;
            ensure!(inputs.space()? == space, "metric is not the bundled example space");
            if let Some(w) = &e.w_d2p {
                ensure!(
                    inputs.subset.as_ref().context("no subset")?.to_points(&space)? == core_points(&space)?,
                    "subset is not the core points"
                );
                ensure!(
                    inputs.function.as_ref().context("no function")?.to_function(&space)? == fixture_function(&space)?,
                    "function is not the fixture"
                );
                ensure!(Inputs::number(&inputs.epsilon, "epsilon")? == epsilon::<Rational>(), "epsilon differs");
                verify_lip_ltp_inputs(&space, inputs, &w.to_core(&space)?)?;
            }
            if let Some(entries) = &e.ld2p {
                let mus = measures_of(&space, &inputs.measures)?;
                ensure!(entries.len() == mus.len() * inputs.gammas.len(), "battery is incomplete");
                for entry in entries {
                    let mu = mus.get(entry.measure).context("battery index out of range")?;
                    ensure!(inputs.gammas.contains(&entry.gamma), "gamma not among the inputs");
                    let g = gamma_of(&entry.gamma)?;
                    let alpha = number(&entry.alpha)?;
                    ensure!(alpha == battery_alpha(g.value()), "alpha is not 2(1 - gamma^2)");
                    entry.outcome.to_core(&space)?.verify(&space, mu, &g)?;
                    let claimed = number(&entry.slice_diameter)?;
                    ensure!(!claimed.is_negative(), "negative diameter");
                }
            }
            example52_verdict(e)
        }
        Payload::Verify { .. } => bail!("a verify report has nothing to replay"),
    };
    ensure!(
        expected == report.verdict,
        "verdict `{}` does not match the payload (expected `{}`)",
        verdict_word(report.verdict),
        verdict_word(expected)
    );
    Ok(())
}

fn verify_lip_ltp_inputs(space: &Space, inputs: &Inputs, w: &LipLtpWitness<Rational>) -> Result<()> {
    let n = inputs.subset.as_ref().context("report has no subset")?.to_points(space)?;
    let f = inputs.function.as_ref().context("report has no function")?.to_function(space)?;
    let e = Inputs::number(&inputs.epsilon, "epsilon")?;
    verify_lip_ltp(space, &n, &e, &f, w)?;
    Ok(())
}
