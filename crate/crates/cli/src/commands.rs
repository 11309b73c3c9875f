use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;

use menger_core::algebra::{check_relation_laws, relation_props, subset_props};
use menger_core::format::{algebra_to_json, representation_to_json, system_to_json, to_json};
use menger_core::function::{semantic_stabilizer, DEFAULT_CLOSURE_CAP};
use menger_core::harness::{run_harness, CrosscheckOptions, GenParams};
use menger_core::stabilizer::{
    check_theorem1_with, check_theorem2_with, check_theorem3_with, check_theorem4_with, check_theorem5_with,
    search_theorem1_u, Artifacts,
};
use menger_core::transforms::{is_normal_v_complex, DEFAULT_MAX_STAGE, DEFAULT_TRANSFORM_CAP};
use menger_core::{
    abstractify, build_witness, ch_closure, check_axioms, chi, concretize, parse_instance, tn_closure, zeta,
    BinaryRelation, CheckMode, ElementSet, Error, FunctionSystem, Instance, MengerAlgebra, Result, TransformSet,
    Verdict, WitnessMode,
};
use serde_json::json;

use crate::{Cli, Command, HarnessArgs, HarnessMode, WitnessKind};

struct Loaded {
    alg: MengerAlgebra,
    system: Option<FunctionSystem>,
}

struct Ctx<'a> {
    cli: &'a Cli,
}

impl Ctx<'_> {
    fn closure_cap(&self) -> usize {
        self.cli.cap.unwrap_or(DEFAULT_CLOSURE_CAP)
    }

    fn transform_cap(&self) -> usize {
        self.cli.cap.unwrap_or(DEFAULT_TRANSFORM_CAP)
    }

    fn read(&self, path: &Path) -> Result<Instance> {
        let text =
            fs::read_to_string(path).map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
        parse_instance(&text, self.closure_cap())
    }

    fn load(&self, path: &Path) -> Result<Loaded> {
        Ok(match self.read(path)? {
            Instance::Concrete(system) => Loaded { alg: abstractify(&system)?, system: Some(system) },
            Instance::Abstract(alg) => Loaded { alg, system: None },
        })
    }

    fn tn(&self, alg: &MengerAlgebra) -> Result<TransformSet> {
        tn_closure(alg, self.transform_cap())
    }

    /// Comma-separated indices, or labels under `--labels`.
    fn set(&self, alg: &MengerAlgebra, text: &str, name: &str) -> Result<ElementSet> {
        let mut items = Vec::new();
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let x = if self.cli.labels {
                alg.element_by_label(part)
                    .ok_or_else(|| Error::Input(format!("--{name}: no element labelled \"{part}\"")))?
            } else {
                part.parse::<usize>()
                    .map_err(|_| Error::Input(format!("--{name}: \"{part}\" is not an element index")))?
            };
            if x >= alg.size() {
                return Err(Error::Input(format!("--{name}: element {x} is out of range (size {})", alg.size())));
            }
            items.push(x);
        }
        ElementSet::from_indices(alg.size(), items)
    }
}

fn emit(text: &str) -> Result<()> {
    let mut out = io::stdout().lock();
    writeln!(out, "{text}").map_err(|e| Error::Input(format!("cannot write output: {e}")))
}

fn exit(pass: bool) -> ExitCode {
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn labels(alg: &MengerAlgebra, set: &ElementSet) -> Vec<String> {
    set.iter().map(|x| alg.label(x)).collect()
}

fn relation_json(alg: &MengerAlgebra, rel: &BinaryRelation) -> serde_json::Value {
    json!({ "pairs": rel.pairs(), "props": relation_props(alg, rel) })
}

pub fn run(cli: &Cli) -> Result<ExitCode> {
    let ctx = Ctx { cli };
    match &cli.command {
        Command::Check { file } => {
            let alg = ctx.load(file)?.alg;
            let report = check_axioms(&alg);
            emit(&to_json(&report))?;
            match report.first_failure() {
                None => eprintln!("all axioms hold"),
                Some(f) => eprintln!("{:?} fails", f.axiom),
            }
            Ok(exit(report.all_pass()))
        }
        Command::Props { file, set } => {
            let alg = ctx.load(file)?.alg;
            let h = ctx.set(&alg, set, "set")?;
            let props = subset_props(&alg, &h)?;
            let nvc = is_normal_v_complex(&alg, &ctx.tn(&alg)?, &h)?;
            emit(&to_json(&json!({ "set": h, "props": props, "normal_v_complex": nvc })))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Relations { file } => {
            let alg = ctx.load(file)?.alg;
            let laws: Vec<serde_json::Value> = check_relation_laws(&alg)
                .into_iter()
                .map(|(name, flag)| json!({ "law": name, "result": flag }))
                .collect();
            emit(&to_json(&json!({
                "axioms_hold": check_axioms(&alg).menger_system(),
                "zeta": relation_json(&alg, &zeta(&alg)),
                "chi": relation_json(&alg, &chi(&alg)),
                "laws": laws,
            })))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Tn { file, dump } => {
            let alg = ctx.load(file)?.alg;
            let tn = ctx.tn(&alg)?;
            let value =
                if *dump { json!({ "size": tn.len(), "maps": tn.maps() }) } else { json!({ "size": tn.len() }) };
            emit(&to_json(&value))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Closure { file, h, x } => {
            let alg = ctx.load(file)?.alg;
            let h = ctx.set(&alg, h, "H")?;
            let x = ctx.set(&alg, x, "X")?;
            let staged = ch_closure(&alg, &ctx.tn(&alg)?, &h, &x)?;
            emit(&to_json(&json!({
                "closure": staged.closure,
                "stages": staged.stages,
                "fixpoint_stage": staged.fixpoint_stage(),
            })))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Theorem { number, file, h, u, m, audit } => {
            let alg = ctx.load(file)?.alg;
            let h = ctx.set(&alg, h, "H")?;
            let mode = if *audit { CheckMode::Audit } else { CheckMode::FirstFailure };
            let u = u.as_deref().map(|s| ctx.set(&alg, s, "U")).transpose()?;
            let verdict = match number {
                1 => {
                    let tn = ctx.tn(&alg)?;
                    let u = match u {
                        Some(u) => Some(u),
                        None => search_theorem1_u(&alg, &tn, &h)?,
                    };
                    match u {
                        Some(u) => check_theorem1_with(&alg, &tn, &h, &u, mode)?,
                        None => Verdict {
                            pass: false,
                            failed: Some("U-search".into()),
                            witness: None,
                            artifacts: Artifacts::default(),
                            failures: Vec::new(),
                        },
                    }
                }
                2 => check_theorem2_with(&alg, &ctx.tn(&alg)?, &h, mode)?,
                3 => check_theorem3_with(&alg, &ctx.tn(&alg)?, &h, m.unwrap_or(DEFAULT_MAX_STAGE), mode)?,
                4 => {
                    let u = u.unwrap_or_else(|| chi(&alg).image(&h));
                    check_theorem4_with(&alg, &h, &u, mode)?
                }
                _ => check_theorem5_with(&alg, &h, mode)?,
            };
            emit(&to_json(&verdict))?;
            match &verdict.failed {
                None => eprintln!("theorem {number}: H = {:?} passes", labels(&alg, &h)),
                Some(c) => eprintln!("theorem {number}: H = {:?} fails at {c}", labels(&alg, &h)),
            }
            Ok(exit(verdict.pass))
        }
        Command::Witness { file, h, mode, u } => {
            let alg = ctx.load(file)?.alg;
            let h = ctx.set(&alg, h, "H")?;
            let u = u.as_deref().map(|s| ctx.set(&alg, s, "U")).transpose()?;
            let tn = ctx.tn(&alg)?;
            let (verdict, witness_mode) = match mode {
                WitnessKind::Theorem2 => {
                    (check_theorem2_with(&alg, &tn, &h, CheckMode::FirstFailure)?, WitnessMode::Theorem2)
                }
                WitnessKind::Theorem4 => {
                    let chosen = u.clone().unwrap_or_else(|| chi(&alg).image(&h));
                    (check_theorem4_with(&alg, &h, &chosen, CheckMode::FirstFailure)?, WitnessMode::Theorem4(u))
                }
            };
            if !verdict.pass {
                emit(&to_json(&verdict))?;
                eprintln!("no witness: H fails at {}", verdict.failed.as_deref().unwrap_or("?"));
                return Ok(ExitCode::from(1));
            }
            let w = build_witness(&alg, &tn, &h, &witness_mode)?;
            emit(&representation_to_json(&alg, &w.representation, Some(w.point), *mode == WitnessKind::Theorem4))?;
            eprintln!("H is the stabilizer of point {}", w.representation.point_labels()[w.point]);
            Ok(ExitCode::SUCCESS)
        }
        Command::Stabilizers { file } => {
            let system = ctx
                .load(file)?
                .system
                .ok_or_else(|| Error::Input("stabilizers needs a function_system instance".into()))?;
            let mut rows = Vec::with_capacity(system.carrier().size());
            for a in 0..system.carrier().size() {
                let h = semantic_stabilizer(&system, a)?;
                let names: Vec<&str> = h.iter().map(|k| system.names()[k].as_str()).collect();
                rows.push(json!({ "point": a, "H": h, "labels": names }));
            }
            emit(&to_json(&rows))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Harness(args) => harness(&ctx, args),
        Command::Convert { file } => match ctx.read(file)? {
            Instance::Concrete(system) => {
                emit(&algebra_to_json(&abstractify(&system)?))?;
                Ok(ExitCode::SUCCESS)
            }
            Instance::Abstract(alg) => {
                let report = check_axioms(&alg);
                if !report.menger_system() {
                    emit(&to_json(&report))?;
                    eprintln!("not a Menger algebra, nothing to represent");
                    return Ok(ExitCode::from(1));
                }
                match concretize(&alg, &ctx.tn(&alg)?) {
                    Ok(system) => {
                        emit(&system_to_json(&system))?;
                        Ok(ExitCode::SUCCESS)
                    }
                    Err(Error::Precondition(msg)) => {
                        eprintln!("no faithful representation found: {msg}");
                        Ok(ExitCode::from(1))
                    }
                    Err(e) => Err(e),
                }
            }
        },
    }
}

fn harness(ctx: &Ctx, args: &HarnessArgs) -> Result<ExitCode> {
    let mut params = match args.mode {
        HarnessMode::Exhaustive => GenParams::exhaustive(args.carrier, args.arity, args.generators, args.meet),
        HarnessMode::Random => {
            GenParams::random(args.carrier, args.arity, args.generators, args.meet, args.seed, args.samples)
        }
    };
    let mut opts = CrosscheckOptions::default();
    if let Some(cap) = ctx.cli.cap {
        params.closure_cap = cap;
        opts.transform_cap = cap;
    }
    if let Some(max) = args.sweep_max {
        opts.sweep_max_size = max;
    }
    let report = run_harness(&params, &opts)?;
    let written = match &args.out {
        Some(path) => fs::File::create(path).and_then(|f| {
            let mut w = io::BufWriter::new(f);
            report.write_jsonl(&mut w)?;
            w.flush()
        }),
        None => report.write_jsonl(&mut io::stdout().lock()),
    };
    written.map_err(|e| Error::Input(format!("cannot write report: {e}")))?;
    let s = &report.summary;
    eprintln!(
        "{} instances (largest {}), {} records, {} discrepancies, {} sweeps skipped",
        s.instances, s.largest, s.records, s.discrepancies, s.sweeps_skipped
    );
    Ok(exit(report.is_clean()))
}
