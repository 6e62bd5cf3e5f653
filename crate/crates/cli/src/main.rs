//! `permod`: decide membership in submodules of permutation modules over
//! tuples of rationals, with certificates that can be re-checked.
//!
//! Exit status: 0 when a question was answered (either way), 2 on bad input,
//! 3 when a certificate fails its own re-check.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use permod::decide::{expand_generators, DecideError};
use permod::format::{
    augvector_to_json, certificate_to_json, decision_from_json, decision_to_json, instance_to_json, modvector_to_json,
    modvectors_from_json, parse_json, to_canonical_string,
};
use permod::oracle::{oracle_membership, random_instance, InstanceProfile, OracleVerdict};
use permod::pmod::omega;
use permod::ring::parse_rational;
use permod::{Decider, MembershipOptions, ModVector, ParamSet, ReductSpec, RingSpec};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "permod", version, about = "Submodule membership for permutation modules over (Q,<)")]
struct Cli {
    /// Group acting on tuples: order automorphisms or all bijections.
    #[arg(long, global = true, value_enum, default_value_t = Structure::Dlo)]
    structure: Structure,
    /// Coefficient ring (Q, Z or GF(p)); coefficients in input files are read in it.
    #[arg(long, global = true)]
    ring: Option<RingSpec>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Structure {
    Dlo,
    PureSet,
}

#[derive(Args)]
struct Problem {
    /// Vector file for the target.
    #[arg(long)]
    target: PathBuf,
    /// Generator files, each holding one vector or an array of vectors.
    #[arg(long = "gens", num_args = 1..)]
    gens: Vec<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Decide membership and print the decision with its certificate.
    Decide {
        #[command(flatten)]
        problem: Problem,
        /// Parameter set to use instead of the target support, e.g. "0,1/2,3".
        #[arg(long)]
        params: Option<String>,
        /// Largest grid searched for an explicit witness (0 = no search).
        #[arg(long, default_value_t = 0)]
        witness_budget: usize,
        /// Also write the certificate alone to this file.
        #[arg(long)]
        emit_certificate: Option<PathBuf>,
    },
    /// Re-check a decision file against its target and generators.
    Verify {
        #[command(flatten)]
        problem: Problem,
        #[arg(long)]
        decision: PathBuf,
    },
    /// Orbit sums of a vector over a parameter set.
    Omega {
        #[arg(long)]
        target: PathBuf,
        /// Parameter set; defaults to the support of the target.
        #[arg(long)]
        params: Option<String>,
    },
    /// Whether the generators produce every tuple.
    GeneratesAll {
        #[arg(long = "gens", num_args = 0..)]
        gens: Vec<PathBuf>,
        /// Tuple length; required when no generator is given.
        #[arg(long)]
        arity: Option<usize>,
    },
    /// A nonzero element supported on at most k tuples.
    MinSupport {
        #[arg(long = "gens", num_args = 1..)]
        gens: Vec<PathBuf>,
        #[arg(long)]
        k: usize,
    },
    /// A single generator for a submodule of augmentation-zero vectors.
    Cyclic {
        #[arg(long = "gens", num_args = 1..)]
        gens: Vec<PathBuf>,
    },
    /// Search for an explicit witness on finite grids.
    OracleCheck {
        #[command(flatten)]
        problem: Problem,
        #[arg(long, default_value_t = 10)]
        max_grid: usize,
    },
    /// Compare consecutive generator sets: included, and properly?
    Chain {
        /// Generator-set files, smallest first.
        #[arg(required = true, num_args = 2..)]
        sets: Vec<PathBuf>,
    },
    /// Print a seeded random instance.
    RandomInstance {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        arity: usize,
        #[arg(long, default_value_t = 3)]
        max_support: usize,
    },
}

enum Failure {
    Input(anyhow::Error),
    Verification(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_json(&text).with_context(|| format!("{}", path.display()))
}

fn read_vectors(path: &Path, ring: Option<RingSpec>) -> anyhow::Result<Vec<ModVector>> {
    Ok(modvectors_from_json(&read_json(path)?, ring, &path.display().to_string())?)
}

fn read_vector(path: &Path, ring: Option<RingSpec>) -> anyhow::Result<ModVector> {
    let mut vs = read_vectors(path, ring)?;
    if vs.len() != 1 {
        bail!("{}: expected a single vector, found {}", path.display(), vs.len());
    }
    Ok(vs.remove(0))
}

fn parse_params(s: &str) -> anyhow::Result<ParamSet> {
    let points = s
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| parse_rational(p).map_err(|e| anyhow!("--params: \"{p}\": {e}")))
        .collect::<anyhow::Result<Vec<_>>>()?;
    ParamSet::new(points).map_err(|e| anyhow!("--params: {e}"))
}

struct Session {
    decider: Decider,
    reduct: ReductSpec,
    ring: Option<RingSpec>,
}

impl Session {
    fn generators(&self, paths: &[PathBuf]) -> anyhow::Result<Vec<ModVector>> {
        let mut gens = Vec::new();
        for p in paths {
            gens.extend(read_vectors(p, self.ring)?);
        }
        Ok(expand_generators(self.decider.oracle(), &gens, self.reduct)?)
    }

    fn problem(&self, problem: &Problem) -> anyhow::Result<(ModVector, Vec<ModVector>)> {
        Ok((read_vector(&problem.target, self.ring)?, self.generators(&problem.gens)?))
    }
}

fn input<T>(r: Result<T, DecideError>) -> Result<T, Failure> {
    r.map_err(|e| match e {
        DecideError::VerificationFailed { what, decision } => Failure::Verification(anyhow!(
            "{what}\n{}",
            to_canonical_string(&decision_to_json(&decision))
        )),
        other => Failure::Input(other.into()),
    })
}

fn run(cli: Cli) -> Result<String, Failure> {
    let session = Session {
        decider: Decider::default(),
        reduct: match cli.structure {
            Structure::Dlo => ReductSpec::None,
            Structure::PureSet => ReductSpec::PureSet,
        },
        ring: cli.ring,
    };
    let d = &session.decider;
    let value = match cli.command {
        Command::Decide {
            problem,
            params,
            witness_budget,
            emit_certificate,
        } => {
            let (target, gens) = session.problem(&problem)?;
            let options = MembershipOptions {
                param_set: params.as_deref().map(parse_params).transpose()?,
                witness_budget,
            };
            let decision = input(d.membership(&target, &gens, &options))?;
            if !d.verify_certificate(&decision, &target, &gens) {
                return Err(Failure::Verification(anyhow!(
                    "certificate failed its re-check\n{}",
                    to_canonical_string(&decision_to_json(&decision))
                )));
            }
            if let Some(path) = emit_certificate {
                fs::write(&path, to_canonical_string(&certificate_to_json(&decision.certificate)))
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
            decision_to_json(&decision)
        }
        Command::Verify { problem, decision } => {
            let (target, gens) = session.problem(&problem)?;
            let parsed = decision_from_json(&read_json(&decision)?, &decision.display().to_string())
                .map_err(anyhow::Error::from)?;
            if !d.verify_certificate(&parsed, &target, &gens) {
                return Err(Failure::Verification(anyhow!("{}: certificate does not verify", decision.display())));
            }
            json!({"verified": true})
        }
        Command::Omega { target, params } => {
            let x = read_vector(&target, session.ring)?;
            let params = match params {
                Some(p) => parse_params(&p)?,
                None => x.support_points(),
            };
            augvector_to_json(&omega(d.oracle(), &x, &params))
        }
        Command::GeneratesAll { gens, arity } => {
            let gens = session.generators(&gens)?;
            let ring = session
                .ring
                .or_else(|| gens.first().map(ModVector::ring))
                .ok_or_else(|| anyhow!("--ring is required without generators"))?;
            let arity = arity
                .or_else(|| gens.first().map(ModVector::arity))
                .ok_or_else(|| anyhow!("--arity is required without generators"))?;
            let result = input(d.generates_all(ring, arity, &gens))?;
            let checks: Vec<Value> = result
                .checks
                .iter()
                .map(|(w, dec)| json!({"decision": decision_to_json(dec), "vector": modvector_to_json(w)}))
                .collect();
            json!({"checks": checks, "generates": result.generates})
        }
        Command::MinSupport { gens, k } => {
            if k == 0 {
                return Err(anyhow!("--k must be at least 1").into());
            }
            let gens = session.generators(&gens)?;
            let found = input(d.min_support(&gens, k))?;
            json!({"k": k, "vector": found.as_ref().map(modvector_to_json)})
        }
        Command::Cyclic { gens } => {
            let gens = session.generators(&gens)?;
            let report = input(d.cyclic_generator(&gens))?;
            json!({
                "backward": decision_to_json(&report.backward),
                "forward": report.forward.iter().map(decision_to_json).collect::<Vec<_>>(),
                "generator": modvector_to_json(&report.generator),
                "placed": report.placed.iter().map(modvector_to_json).collect::<Vec<_>>(),
            })
        }
        Command::OracleCheck { problem, max_grid } => {
            let (target, gens) = session.problem(&problem)?;
            match oracle_membership(&target, &gens, max_grid, d.execution()) {
                OracleVerdict::Member { grid_size, witness } => json!({
                    "gridSize": grid_size,
                    "verdict": "member",
                    "witness": witness
                        .iter()
                        .map(|t| json!({
                            "coeff": t.coeff.to_string(),
                            "generator": t.generator,
                            "image": modvector_to_json(&t.image),
                        }))
                        .collect::<Vec<_>>(),
                }),
                OracleVerdict::Inconclusive => json!({"maxGrid": max_grid, "verdict": "inconclusive"}),
            }
        }
        Command::Chain { sets } => {
            let modules = sets
                .iter()
                .map(|p| session.generators(std::slice::from_ref(p)))
                .collect::<anyhow::Result<Vec<_>>>()?;
            let options = MembershipOptions::default();
            let mut steps = Vec::new();
            for (i, pair) in modules.windows(2).enumerate() {
                let (small, large) = (&pair[0], &pair[1]);
                let mut excluded = None;
                for (j, g) in small.iter().enumerate() {
                    let dec = input(d.membership(g, large, &options))?;
                    if !dec.member {
                        excluded = Some((j, dec));
                        break;
                    }
                }
                let mut witness = None;
                if excluded.is_none() {
                    for (j, g) in large.iter().enumerate() {
                        let dec = input(d.membership(g, small, &options))?;
                        if !dec.member {
                            witness = Some((j, dec));
                            break;
                        }
                    }
                }
                let step = match (excluded, witness) {
                    (Some((j, dec)), _) => json!({
                        "decision": decision_to_json(&dec),
                        "from": sets[i].display().to_string(),
                        "generator": j,
                        "status": "not-included",
                        "to": sets[i + 1].display().to_string(),
                    }),
                    (None, Some((j, dec))) => json!({
                        "decision": decision_to_json(&dec),
                        "from": sets[i].display().to_string(),
                        "generator": j,
                        "status": "proper",
                        "to": sets[i + 1].display().to_string(),
                    }),
                    (None, None) => json!({
                        "from": sets[i].display().to_string(),
                        "status": "equal",
                        "to": sets[i + 1].display().to_string(),
                    }),
                };
                steps.push(step);
            }
            json!({"steps": steps})
        }
        Command::RandomInstance {
            seed,
            arity,
            max_support,
        } => {
            if arity == 0 || max_support == 0 {
                return Err(anyhow!("--arity and --max-support must be positive").into());
            }
            let profile = InstanceProfile::new(arity, max_support, session.ring.unwrap_or(RingSpec::Rationals));
            instance_to_json(&random_instance(seed, &profile))
        }
    };
    Ok(to_canonical_string(&value))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out = cli.out.clone();
    match run(cli) {
        Ok(text) => match out {
            Some(path) => match fs::write(&path, text) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    ExitCode::from(2)
                }
            },
            None => {
                print!("{text}");
                ExitCode::SUCCESS
            }
        },
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Verification(e)) => {
            eprintln!("verification failure: {e:#}");
            ExitCode::from(3)
        }
    }
}
