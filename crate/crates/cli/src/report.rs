//! Report format: a command echo, a hash of the inputs, a verdict and a
//! payload. Points are written by label and numbers as `"p/q"` strings, so
//! a report round-trips through JSON without loss and can be replayed by
//! `lipfree verify`.

use std::collections::BTreeSet;

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use lipfree::d2p::{
    AugmentationFailure, Augmentations, Ld2pCertificate, Ld2pOutcome, Ld2pRoute, LipLtpWitness, LtpCandidate,
    LtpViolation, Sd2pCertificate, Sd2pOutcome, Sd2pPart, SetExhaustion, TwoLipLtp, TwoLipLtpOutcome,
};
use lipfree::io::{format_number, pair_labels, parse_number, FunctionFile, MeasureFile, MetricFile, PairsFile, PointsFile};
use lipfree::{CmCertificate, CmVerdict, CmViolation, FiniteMetricSpace, Gamma, OrderedPair, PairSet, PointIndex, Rational};

pub type Space = FiniteMetricSpace<Rational>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// The property holds or a certificate was found.
    Holds,
    /// The property fails; the payload carries the refutation.
    Refuted,
    /// The search was exhausted; the payload carries the log.
    Absent,
    /// A value was computed; there is nothing to refute.
    Computed,
}

impl Verdict {
    pub fn exit_code(self) -> u8 {
        match self {
            Verdict::Holds | Verdict::Computed => 0,
            Verdict::Refuted | Verdict::Absent => 2,
        }
    }
}

/// Everything a command read, in canonical form.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Inputs {
    pub metric: Option<MetricFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<PairsFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub measures: Vec<MeasureFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<FunctionFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset: Option<PointsFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub gammas: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<u32>,
}

impl Inputs {
    pub fn sha256(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("inputs serialize");
        hex::encode(Sha256::digest(&bytes))
    }

    pub fn space(&self) -> Result<Space> {
        Ok(self.metric.as_ref().context("report has no metric")?.to_space()?)
    }

    pub fn gamma(&self) -> Result<Gamma<Rational>> {
        match self.gammas.as_slice() {
            [g] => Ok(Gamma::new(parse_number(g)?)?),
            _ => bail!("expected exactly one gamma"),
        }
    }

    pub fn pair_set(&self, space: &Space) -> Result<PairSet> {
        Ok(self.pairs.as_ref().context("report has no pairs")?.to_pairs(space)?)
    }

    pub fn number(field: &Option<String>, name: &str) -> Result<Rational> {
        Ok(parse_number(field.as_deref().with_context(|| format!("report has no {name}"))?)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: Vec<String>,
    pub inputs_sha256: String,
    pub verdict: Verdict,
    pub inputs: Inputs,
    pub payload: Payload,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl Report {
    pub fn new(command: Vec<String>, inputs: Inputs, verdict: Verdict, payload: Payload) -> Self {
        Report {
            command,
            inputs_sha256: inputs.sha256(),
            verdict,
            inputs,
            payload,
            timing_ms: None,
        }
    }
}

// ------------------------------------------------------------ payloads

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Payload {
    Validate {
        violation: Option<String>,
    },
    CheckCm {
        verdict: CmVerdictDto,
    },
    Witness {
        verdict: CmVerdictDto,
        function: Option<FunctionFile>,
    },
    Norm {
        norm: String,
        maximizer: FunctionFile,
    },
    Optimal {
        norm: String,
        mass: String,
        verdict: CmVerdictDto,
        /// Witness of slope 1 on the support when optimal.
        function: Option<FunctionFile>,
    },
    Positivize {
        measure: MeasureFile,
        total_variation: String,
    },
    SliceDiam(SliceDto),
    LipLtp(LipLtpDto),
    TwoLipLtp(TwoLipLtpDto),
    Ld2pCert(Ld2pDto),
    Sd2pCert(Sd2pDto),
    PruneCm(PruneDto),
    Example52(Example52Dto),
    Verify {
        replayed: String,
        verdict: Verdict,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CmVerdictDto {
    Monotone { potentials: Vec<String> },
    Violated(ViolationDto),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationDto {
    /// Pair indices into the (augmented) pair set.
    pub cycle: Vec<usize>,
    /// The pairs along the cycle, for reading.
    pub pairs: Vec<[String; 2]>,
    pub deficit: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceDto {
    pub alpha: String,
    pub diameter: String,
    pub pair: Option<[String; 2]>,
    pub f: FunctionFile,
    pub g: FunctionFile,
    pub scale: String,
    pub pairs_examined: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LtpViolationDto {
    pub x: String,
    pub y: String,
    pub factor: String,
    pub bracket: String,
    pub lhs: String,
    pub rhs: String,
    pub excess: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LtpCandidateDto {
    pub u: String,
    pub v: String,
    pub violations: Vec<LtpViolationDto>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LipLtpDto {
    pub found: Option<[String; 2]>,
    /// Rejected candidates (all of them when nothing was found).
    pub candidates: Vec<LtpCandidateDto>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureDto {
    pub u: String,
    pub v: String,
    pub forward: Option<ViolationDto>,
    pub backward: Option<ViolationDto>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentationsDto {
    pub forward: Vec<String>,
    pub backward: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoLipLtpFoundDto {
    pub u: String,
    pub v: String,
    pub gamma: String,
    pub f: FunctionFile,
    pub g: FunctionFile,
    pub certificates: AugmentationsDto,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoLipLtpDto {
    pub found: Option<TwoLipLtpFoundDto>,
    pub rejected: Vec<FailureDto>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ld2pCertDto {
    pub set: PairsFile,
    pub f: FunctionFile,
    pub g: FunctionFile,
    pub u: String,
    pub v: String,
    pub gamma: String,
    pub route: String,
    pub certificates: AugmentationsDto,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExhaustionDto {
    pub set: PairsFile,
    pub mass: String,
    pub failures: Vec<FailureDto>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ld2pDto {
    pub certificate: Option<Ld2pCertDto>,
    pub tried: Vec<ExhaustionDto>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sd2pPartDto {
    pub set: PairsFile,
    pub f: FunctionFile,
    pub g: FunctionFile,
    pub certificates: AugmentationsDto,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sd2pCertDto {
    pub u: String,
    pub v: String,
    pub gamma: String,
    pub parts: Vec<Sd2pPartDto>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sd2pRejectionDto {
    pub u: String,
    pub v: String,
    /// Index of the first measure without a usable set.
    pub measure: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sd2pDto {
    pub certificate: Option<Sd2pCertDto>,
    pub rejected: Vec<Sd2pRejectionDto>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PruneDto {
    pub kept: PairsFile,
    pub dropped: PairsFile,
    pub buckets: Option<usize>,
    pub dropped_bucket: Option<usize>,
    pub potentials: Vec<String>,
    pub mass_kept: String,
    pub mass_bound: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatteryEntry {
    /// Index into `inputs.measures`.
    pub measure: usize,
    pub gamma: String,
    /// The α with γ² = 1 - α/2.
    pub alpha: String,
    pub outcome: Ld2pDto,
    pub slice_diameter: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Example52Dto {
    pub levels: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_d2p: Option<LipLtpDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ld2p: Option<Vec<BatteryEntry>>,
}

// --------------------------------------------------------- conversions

pub fn num(x: &Rational) -> String {
    format_number(x)
}

pub fn nums(xs: &[Rational]) -> Vec<String> {
    xs.iter().map(num).collect()
}

pub fn parse_nums(xs: &[String]) -> Result<Vec<Rational>> {
    xs.iter().map(|x| Ok(parse_number(x)?)).collect()
}

pub fn label(space: &Space, p: PointIndex) -> String {
    space.label(p).as_str().to_owned()
}

pub fn point(space: &Space, name: &str) -> Result<PointIndex> {
    Ok(space.index_of(name)?)
}

fn points2(space: &Space, u: &str, v: &str) -> Result<(PointIndex, PointIndex)> {
    Ok((point(space, u)?, point(space, v)?))
}

pub fn cm_verdict_dto(space: &Space, pairs: &PairSet, verdict: &CmVerdict<Rational>) -> CmVerdictDto {
    match verdict {
        CmVerdict::Monotone(c) => CmVerdictDto::Monotone {
            potentials: nums(&c.potentials),
        },
        CmVerdict::Violated(v) => CmVerdictDto::Violated(violation_dto(space, pairs, v)),
    }
}

pub fn violation_dto(space: &Space, pairs: &PairSet, v: &CmViolation<Rational>) -> ViolationDto {
    ViolationDto {
        cycle: v.cycle.clone(),
        pairs: v
            .cycle
            .iter()
            .filter_map(|&i| pairs.get(i))
            .map(|p| pair_labels(space, p))
            .collect(),
        deficit: num(&v.deficit),
    }
}

impl CmVerdictDto {
    pub fn to_core(&self) -> Result<CmVerdict<Rational>> {
        Ok(match self {
            CmVerdictDto::Monotone { potentials } => CmVerdict::Monotone(CmCertificate {
                potentials: parse_nums(potentials)?,
            }),
            CmVerdictDto::Violated(v) => CmVerdict::Violated(v.to_core()?),
        })
    }
}

impl ViolationDto {
    pub fn to_core(&self) -> Result<CmViolation<Rational>> {
        Ok(CmViolation {
            cycle: self.cycle.clone(),
            deficit: parse_number(&self.deficit)?,
        })
    }
}

fn function_of(space: &Space, file: &FunctionFile) -> Result<lipfree::LipschitzFunction<Rational>> {
    Ok(file.to_function(space)?)
}

fn set_of(space: &Space, file: &PairsFile) -> Result<PairSet> {
    Ok(file.to_pairs(space)?)
}

pub fn lip_ltp_dto(space: &Space, w: &LipLtpWitness<Rational>) -> LipLtpDto {
    let candidate = |c: &LtpCandidate<Rational>| LtpCandidateDto {
        u: label(space, c.u),
        v: label(space, c.v),
        violations: c
            .violations
            .iter()
            .map(|w| LtpViolationDto {
                x: label(space, w.x),
                y: label(space, w.y),
                factor: num(&w.factor),
                bracket: num(&w.bracket),
                lhs: num(&w.lhs),
                rhs: num(&w.rhs),
                excess: num(&w.excess),
            })
            .collect(),
    };
    match w {
        LipLtpWitness::Found { u, v, rejected } => LipLtpDto {
            found: Some([label(space, *u), label(space, *v)]),
            candidates: rejected.iter().map(candidate).collect(),
        },
        LipLtpWitness::Absent { candidates } => LipLtpDto {
            found: None,
            candidates: candidates.iter().map(candidate).collect(),
        },
    }
}

impl LipLtpDto {
    pub fn to_core(&self, space: &Space) -> Result<LipLtpWitness<Rational>> {
        let candidates = self
            .candidates
            .iter()
            .map(|c| {
                let (u, v) = points2(space, &c.u, &c.v)?;
                let violations = c
                    .violations
                    .iter()
                    .map(|w| {
                        Ok(LtpViolation {
                            x: point(space, &w.x)?,
                            y: point(space, &w.y)?,
                            factor: parse_number(&w.factor)?,
                            bracket: parse_number(&w.bracket)?,
                            lhs: parse_number(&w.lhs)?,
                            rhs: parse_number(&w.rhs)?,
                            excess: parse_number(&w.excess)?,
                        })
                    })
                    .collect::<Result<_>>()?;
                Ok(LtpCandidate { u, v, violations })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(match &self.found {
            Some([u, v]) => {
                let (u, v) = points2(space, u, v)?;
                LipLtpWitness::Found {
                    u,
                    v,
                    rejected: candidates,
                }
            }
            None => LipLtpWitness::Absent { candidates },
        })
    }
}

/// The pair set a failure's cycles index into.
fn augmented(set: &PairSet, u: PointIndex, v: PointIndex) -> PairSet {
    match OrderedPair::new(u, v) {
        Ok(p) => set.with(p),
        Err(_) => set.clone(),
    }
}

pub fn failure_dto(space: &Space, set: &PairSet, f: &AugmentationFailure<Rational>) -> FailureDto {
    FailureDto {
        u: label(space, f.u),
        v: label(space, f.v),
        forward: f
            .forward
            .as_ref()
            .map(|c| violation_dto(space, &augmented(set, f.u, f.v), c)),
        backward: f
            .backward
            .as_ref()
            .map(|c| violation_dto(space, &augmented(set, f.v, f.u), c)),
    }
}

impl FailureDto {
    pub fn to_core(&self, space: &Space) -> Result<AugmentationFailure<Rational>> {
        let (u, v) = points2(space, &self.u, &self.v)?;
        Ok(AugmentationFailure {
            u,
            v,
            forward: self.forward.as_ref().map(ViolationDto::to_core).transpose()?,
            backward: self.backward.as_ref().map(ViolationDto::to_core).transpose()?,
        })
    }
}

fn augmentations_dto(a: &Augmentations<Rational>) -> AugmentationsDto {
    AugmentationsDto {
        forward: nums(&a.forward.potentials),
        backward: nums(&a.backward.potentials),
    }
}

impl AugmentationsDto {
    fn to_core(&self) -> Result<Augmentations<Rational>> {
        Ok(Augmentations {
            forward: CmCertificate {
                potentials: parse_nums(&self.forward)?,
            },
            backward: CmCertificate {
                potentials: parse_nums(&self.backward)?,
            },
        })
    }
}

pub fn two_lip_ltp_dto(space: &Space, set: &PairSet, outcome: &TwoLipLtpOutcome<Rational>) -> TwoLipLtpDto {
    match outcome {
        TwoLipLtpOutcome::Found { witness, rejected } => TwoLipLtpDto {
            found: Some(TwoLipLtpFoundDto {
                u: label(space, witness.u),
                v: label(space, witness.v),
                gamma: num(witness.gamma.value()),
                f: FunctionFile::from_function(space, &witness.f),
                g: FunctionFile::from_function(space, &witness.g),
                certificates: augmentations_dto(&witness.certificates),
            }),
            rejected: rejected.iter().map(|f| failure_dto(space, set, f)).collect(),
        },
        TwoLipLtpOutcome::Absent { candidates } => TwoLipLtpDto {
            found: None,
            rejected: candidates.iter().map(|f| failure_dto(space, set, f)).collect(),
        },
    }
}

impl TwoLipLtpDto {
    pub fn to_core(&self, space: &Space) -> Result<TwoLipLtpOutcome<Rational>> {
        let failures = self
            .rejected
            .iter()
            .map(|f| f.to_core(space))
            .collect::<Result<Vec<_>>>()?;
        Ok(match &self.found {
            Some(w) => {
                let (u, v) = points2(space, &w.u, &w.v)?;
                TwoLipLtpOutcome::Found {
                    witness: TwoLipLtp {
                        u,
                        v,
                        gamma: Gamma::new(parse_number(&w.gamma)?)?,
                        f: function_of(space, &w.f)?,
                        g: function_of(space, &w.g)?,
                        certificates: w.certificates.to_core()?,
                    },
                    rejected: failures,
                }
            }
            None => TwoLipLtpOutcome::Absent { candidates: failures },
        })
    }
}

fn route_name(route: Ld2pRoute) -> &'static str {
    match route {
        Ld2pRoute::IntegerRounding => "integer-rounding",
        Ld2pRoute::Augmented => "augmented",
    }
}

fn route_of(name: &str) -> Result<Ld2pRoute> {
    match name {
        "integer-rounding" => Ok(Ld2pRoute::IntegerRounding),
        "augmented" => Ok(Ld2pRoute::Augmented),
        other => Err(anyhow!("unknown route `{other}`")),
    }
}

pub fn ld2p_cert_dto(space: &Space, c: &Ld2pCertificate<Rational>) -> Ld2pCertDto {
    Ld2pCertDto {
        set: PairsFile::from_pairs(space, &c.set),
        f: FunctionFile::from_function(space, &c.f),
        g: FunctionFile::from_function(space, &c.g),
        u: label(space, c.u),
        v: label(space, c.v),
        gamma: num(c.gamma.value()),
        route: route_name(c.route).to_owned(),
        certificates: augmentations_dto(&c.certificates),
    }
}

pub fn ld2p_dto(space: &Space, outcome: &Ld2pOutcome<Rational>) -> Ld2pDto {
    match outcome {
        Ld2pOutcome::Found(c) => Ld2pDto {
            certificate: Some(ld2p_cert_dto(space, c)),
            tried: Vec::new(),
        },
        Ld2pOutcome::Absent { tried } => Ld2pDto {
            certificate: None,
            tried: tried
                .iter()
                .map(|t| ExhaustionDto {
                    set: PairsFile::from_pairs(space, &t.set),
                    mass: num(&t.mass),
                    failures: t.failures.iter().map(|f| failure_dto(space, &t.set, f)).collect(),
                })
                .collect(),
        },
    }
}

impl Ld2pDto {
    pub fn to_core(&self, space: &Space) -> Result<Ld2pOutcome<Rational>> {
        if let Some(c) = &self.certificate {
            let (u, v) = points2(space, &c.u, &c.v)?;
            return Ok(Ld2pOutcome::Found(Ld2pCertificate {
                set: set_of(space, &c.set)?,
                f: function_of(space, &c.f)?,
                g: function_of(space, &c.g)?,
                u,
                v,
                gamma: Gamma::new(parse_number(&c.gamma)?)?,
                route: route_of(&c.route)?,
                certificates: c.certificates.to_core()?,
            }));
        }
        let tried = self
            .tried
            .iter()
            .map(|t| {
                Ok(SetExhaustion {
                    set: set_of(space, &t.set)?,
                    mass: parse_number(&t.mass)?,
                    failures: t.failures.iter().map(|f| f.to_core(space)).collect::<Result<_>>()?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Ld2pOutcome::Absent { tried })
    }
}

pub fn sd2p_dto(space: &Space, outcome: &Sd2pOutcome<Rational>) -> Sd2pDto {
    match outcome {
        Sd2pOutcome::Found(c) => Sd2pDto {
            certificate: Some(Sd2pCertDto {
                u: label(space, c.u),
                v: label(space, c.v),
                gamma: num(c.gamma.value()),
                parts: c
                    .parts
                    .iter()
                    .map(|p| Sd2pPartDto {
                        set: PairsFile::from_pairs(space, &p.set),
                        f: FunctionFile::from_function(space, &p.f),
                        g: FunctionFile::from_function(space, &p.g),
                        certificates: augmentations_dto(&p.certificates),
                    })
                    .collect(),
            }),
            rejected: Vec::new(),
        },
        Sd2pOutcome::Absent { rejected } => Sd2pDto {
            certificate: None,
            rejected: rejected
                .iter()
                .map(|(p, i)| {
                    let [u, v] = pair_labels(space, p);
                    Sd2pRejectionDto { u, v, measure: *i }
                })
                .collect(),
        },
    }
}

impl Sd2pDto {
    pub fn to_core(&self, space: &Space) -> Result<Sd2pOutcome<Rational>> {
        if let Some(c) = &self.certificate {
            let (u, v) = points2(space, &c.u, &c.v)?;
            let parts = c
                .parts
                .iter()
                .map(|p| {
                    Ok(Sd2pPart {
                        set: set_of(space, &p.set)?,
                        f: function_of(space, &p.f)?,
                        g: function_of(space, &p.g)?,
                        certificates: p.certificates.to_core()?,
                    })
                })
                .collect::<Result<_>>()?;
            return Ok(Sd2pOutcome::Found(Sd2pCertificate {
                u,
                v,
                gamma: Gamma::new(parse_number(&c.gamma)?)?,
                parts,
            }));
        }
        let rejected = self
            .rejected
            .iter()
            .map(|r| Ok((space.pair(&r.u, &r.v)?, r.measure)))
            .collect::<Result<_>>()?;
        Ok(Sd2pOutcome::Absent { rejected })
    }
}

pub fn subset_labels(space: &Space, subset: &BTreeSet<PointIndex>) -> PointsFile {
    PointsFile {
        points: subset.iter().map(|&p| label(space, p)).collect(),
    }
}

// ---------------------------------------------------------------- text

fn pair_text(p: &[String; 2]) -> String {
    format!("({}, {})", p[0], p[1])
}

fn cm_text(out: &mut Vec<String>, v: &CmVerdictDto) {
    match v {
        CmVerdictDto::Monotone { potentials } => {
            out.push(format!("potentials: [{}]", potentials.join(", ")));
        }
        CmVerdictDto::Violated(c) => out.push(violation_text(c)),
    }
}

fn violation_text(c: &ViolationDto) -> String {
    let cycle: Vec<String> = c.pairs.iter().map(pair_text).collect();
    format!("violating cycle {} with beta-sum {} < 0", cycle.join(" -> "), c.deficit)
}

fn function_text(name: &str, f: &FunctionFile) -> String {
    let values: Vec<String> = f.values.iter().map(|(k, v)| format!("{k}={v}")).collect();
    format!("{name}: {}", values.join(" "))
}

/// `a·b` written over the product of the denominators, unreduced, so the
/// row reads as the multiplication it is (`(13/14)(7/2) = 91/28`).
fn product_text(a: &str, b: &str) -> Option<String> {
    let split = |t: &str| -> Option<(i128, i128)> {
        match t.split_once('/') {
            Some((n, d)) => Some((n.parse().ok()?, d.parse().ok()?)),
            None => Some((t.parse().ok()?, 1)),
        }
    };
    let ((an, ad), (bn, bd)) = (split(a)?, split(b)?);
    let (n, d) = (an.checked_mul(bn)?, ad.checked_mul(bd)?);
    Some(if d == 1 { n.to_string() } else { format!("{n}/{d}") })
}

pub fn ltp_rows(out: &mut Vec<String>, dto: &LipLtpDto) {
    for c in &dto.candidates {
        for w in &c.violations {
            let lhs = product_text(&w.factor, &w.bracket).unwrap_or_else(|| w.lhs.clone());
            out.push(format!(
                "({}, {}) at ({}, {}): ({})({}) = {} > {}",
                c.u, c.v, w.x, w.y, w.factor, w.bracket, lhs, w.rhs
            ));
        }
    }
}

fn failure_text(out: &mut Vec<String>, f: &FailureDto) {
    let mut parts = Vec::new();
    if let Some(c) = &f.forward {
        parts.push(format!("forward: {}", violation_text(c)));
    }
    if let Some(c) = &f.backward {
        parts.push(format!("backward: {}", violation_text(c)));
    }
    out.push(format!("rejected ({}, {}): {}", f.u, f.v, parts.join("; ")));
}

fn ld2p_text(out: &mut Vec<String>, dto: &Ld2pDto) {
    match &dto.certificate {
        Some(c) => {
            let set: Vec<String> = c.set.pairs.iter().map(pair_text).collect();
            out.push(format!(
                "certificate: A = {{{}}}, (u, v) = ({}, {}), gamma = {}, route {}",
                set.join(", "),
                c.u,
                c.v,
                c.gamma,
                c.route
            ));
            out.push(function_text("f", &c.f));
            out.push(function_text("g", &c.g));
        }
        None => {
            out.push(format!("ABSENT after {} cyclically monotonic candidate sets", dto.tried.len()));
            for t in &dto.tried {
                let set: Vec<String> = t.set.pairs.iter().map(pair_text).collect();
                out.push(format!("set {{{}}} (mass {}):", set.join(", "), t.mass));
                for f in &t.failures {
                    failure_text(out, f);
                }
            }
        }
    }
}

pub fn render_text(report: &Report) -> String {
    let mut out = vec![
        format!("command: {}", report.command.join(" ")),
        format!("inputs sha256: {}", report.inputs_sha256),
        format!("verdict: {}", verdict_word(report.verdict)),
    ];
    match &report.payload {
        Payload::Validate { violation } => match violation {
            Some(v) => out.push(format!("violation: {v}")),
            None => out.push("all metric axioms hold".into()),
        },
        Payload::CheckCm { verdict } => cm_text(&mut out, verdict),
        Payload::Witness { verdict, function } => {
            cm_text(&mut out, verdict);
            if let Some(f) = function {
                out.push(function_text("witness", f));
            }
        }
        Payload::Norm { norm, maximizer } => {
            out.push(format!("norm: {norm}"));
            out.push(function_text("maximizer", maximizer));
        }
        Payload::Optimal { norm, mass, verdict, function } => {
            out.push(format!("norm: {norm}, mass: {mass}"));
            cm_text(&mut out, verdict);
            if let Some(f) = function {
                out.push(function_text("witness", f));
            }
        }
        Payload::Positivize { measure, total_variation } => {
            for a in &measure.atoms {
                out.push(format!("({}, {}): {}", a.from, a.to, a.weight));
            }
            out.push(format!("total variation: {total_variation}"));
        }
        Payload::SliceDiam(s) => {
            out.push(format!("supremal diameter: {} (alpha = {}, scale {})", s.diameter, s.alpha, s.scale));
            if let Some(p) = &s.pair {
                out.push(format!("attained across {}", pair_text(p)));
            }
            out.push(function_text("f", &s.f));
            out.push(function_text("g", &s.g));
            out.push(format!("pairs examined: {}", s.pairs_examined));
        }
        Payload::LipLtp(dto) => {
            match &dto.found {
                Some(p) => out.push(format!("witness (u, v) = {}", pair_text(p))),
                None => out.push(format!("ABSENT: all {} candidates violate", dto.candidates.len())),
            }
            ltp_rows(&mut out, dto);
        }
        Payload::TwoLipLtp(dto) => {
            match &dto.found {
                Some(w) => {
                    out.push(format!("witness (u, v) = ({}, {}), gamma = {}", w.u, w.v, w.gamma));
                    out.push(function_text("f", &w.f));
                    out.push(function_text("g", &w.g));
                }
                None => out.push(format!("ABSENT: all {} candidates rejected", dto.rejected.len())),
            }
            for f in &dto.rejected {
                failure_text(&mut out, f);
            }
        }
        Payload::Ld2pCert(dto) => ld2p_text(&mut out, dto),
        Payload::Sd2pCert(dto) => match &dto.certificate {
            Some(c) => {
                out.push(format!("common pair (u, v) = ({}, {}), gamma = {}", c.u, c.v, c.gamma));
                for (i, p) in c.parts.iter().enumerate() {
                    let set: Vec<String> = p.set.pairs.iter().map(pair_text).collect();
                    out.push(format!("part {i}: A = {{{}}}", set.join(", ")));
                    out.push(function_text("  f", &p.f));
                    out.push(function_text("  g", &p.g));
                }
            }
            None => {
                out.push("ABSENT".into());
                for r in &dto.rejected {
                    out.push(format!("rejected ({}, {}): measure {} has no usable set", r.u, r.v, r.measure));
                }
            }
        },
        Payload::PruneCm(p) => {
            let set = |f: &PairsFile| f.pairs.iter().map(pair_text).collect::<Vec<_>>().join(", ");
            out.push(format!("kept: {{{}}}", set(&p.kept)));
            out.push(format!("dropped: {{{}}}", set(&p.dropped)));
            if let (Some(k), Some(b)) = (p.buckets, p.dropped_bucket) {
                out.push(format!("buckets: {k}, dropped bucket: {b}"));
            }
            out.push(format!("integer potentials: [{}]", p.potentials.join(", ")));
            out.push(format!("mass kept {} >= bound {}", p.mass_kept, p.mass_bound));
        }
        Payload::Example52(e) => {
            out.push(format!("levels: {}", e.levels));
            if let Some(w) = &e.w_d2p {
                match &w.found {
                    Some(p) => out.push(format!("w*-D2P half: Lip-LTP witness {} found", pair_text(p))),
                    None => out.push(format!(
                        "w*-D2P half: Lip-LTP ABSENT, all {} candidates violate:",
                        w.candidates.len()
                    )),
                }
                ltp_rows(&mut out, w);
            }
            if let Some(entries) = &e.ld2p {
                let found = entries.iter().filter(|b| b.outcome.certificate.is_some()).count();
                out.push(format!("LD2P half: {found}/{} certificates", entries.len()));
                for b in entries {
                    let status = match &b.outcome.certificate {
                        Some(c) => format!("(u, v) = ({}, {}) via {}", c.u, c.v, c.route),
                        None => "ABSENT".into(),
                    };
                    out.push(format!(
                        "measure {} gamma {}: {status}; slice diameter at alpha {} = {}",
                        b.measure, b.gamma, b.alpha, b.slice_diameter
                    ));
                }
            }
        }
        Payload::Verify { replayed, verdict } => {
            out.push(format!("replayed {replayed} report with verdict {}", verdict_word(*verdict)));
        }
    }
    if let Some(ms) = report.timing_ms {
        out.push(format!("time: {ms:.1} ms"));
    }
    out.join("\n") + "\n"
}

pub fn verdict_word(v: Verdict) -> &'static str {
    match v {
        Verdict::Holds => "holds",
        Verdict::Refuted => "refuted",
        Verdict::Absent => "ABSENT",
        Verdict::Computed => "computed",
    }
}
