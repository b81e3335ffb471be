use std::fmt;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use tdsched::equilibrium::{self, ActivationPolicy, BrdOutcome};
use tdsched::generators::{self, SampleParams};
use tdsched::mechanisms::{self, PolicyKind};
use tdsched::schedule::{build_schedule, Profile};
use tdsched::solvers::{self, TieBreak};
use tdsched::{GameClass, GameError, GameInstance, Numeric};

use crate::instance::InstanceFile;
use crate::report::{dual, instance_digest, schedule_json, Report};
use crate::{
    AlgorithmChoice, AnalyzeAction, ClassChoice, Command, FamilyChoice,
    MechanismChoice, NumericChoice, PolicyChoice, TieBreakChoice,
};

#[derive(Debug)]
pub enum CliError {
    Game(GameError),
    Io(String),
    Parse(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Game(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Parse(e) => write!(f, "{e}"),
        }
    }
}

impl From<GameError> for CliError {
    fn from(e: GameError) -> Self {
        CliError::Game(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn read_file(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

struct LoadedInstance {
    game: GameInstance,
    names: Option<Vec<String>>,
    digest: String,
}

fn load_instance(
    path: &Path,
    numeric: Option<NumericChoice>,
    tol: f64,
) -> CliResult<LoadedInstance> {
    let text = read_file(path)?;
    let file: InstanceFile = serde_json::from_str(&text).map_err(|e| {
        CliError::Parse(format!(
            "{}: JSON error at line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })?;
    let digest = instance_digest(&file);
    let mut game = file.to_game(tol)?;
    match numeric {
        Some(NumericChoice::Float) => game = game.to_float(tol),
        Some(NumericChoice::Rational) => game = game.to_rational(),
        None => {}
    }
    Ok(LoadedInstance { game, names: file.names(), digest })
}

fn emit(report: &Report, out: Option<&PathBuf>) -> CliResult<()> {
    let body = report.to_json();
    match out {
        Some(path) => std::fs::write(path, body + "\n")
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            println!("{body}");
            Ok(())
        }
    }
}

fn parse_inline_profile(
    text: &str,
    game: &GameInstance,
    names: Option<&[String]>,
) -> CliResult<Profile> {
    let mut assignment = vec![usize::MAX; game.n()];
    for token in text.split(',') {
        let (job_s, mach_s) = token.split_once(':').ok_or_else(|| {
            CliError::Parse(format!("profile token {token:?} is not job:machine"))
        })?;
        let job_s = job_s.trim();
        let job = match job_s.parse::<usize>() {
            Ok(id) => id,
            Err(_) => names
                .and_then(|ns| ns.iter().position(|n| n == job_s))
                .ok_or_else(|| {
                    CliError::Parse(format!("unknown job name {job_s:?} in profile"))
                })?,
        };
        let mach: usize = mach_s
            .trim()
            .parse()
            .map_err(|_| CliError::Parse(format!("bad machine id {mach_s:?}")))?;
        if job >= game.n() || mach >= game.m() {
            return Err(CliError::Parse(format!("profile entry {token:?} out of range")));
        }
        assignment[job] = mach;
    }
    if assignment.iter().any(|&a| a == usize::MAX) {
        return Err(CliError::Parse("profile must assign every job".into()));
    }
    Ok(Profile(assignment))
}

fn parse_profile_from(
    inline: Option<&String>,
    file: Option<&PathBuf>,
    game: &GameInstance,
    names: Option<&[String]>,
) -> CliResult<Profile> {
    match (inline, file) {
        (Some(text), None) => parse_inline_profile(text, game, names),
        (None, Some(path)) => {
            let text = read_file(path)?;
            let raw: Vec<usize> = serde_json::from_str(&text)
                .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
            if raw.len() != game.n() || raw.iter().any(|&mj| mj >= game.m()) {
                return Err(CliError::Parse("profile has wrong shape".into()));
            }
            Ok(Profile(raw))
        }
        _ => Err(CliError::Parse(
            "provide exactly one of --profile or --profile-file".into(),
        )),
    }
}

fn profile_json(profile: &Profile) -> Value {
    json!(profile.0)
}

pub fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Simulate { instance, profile, profile_file, common } => {
            let loaded = load_instance(&instance, common.numeric, common.tol)?;
            let prof = parse_profile_from(
                profile.as_ref(),
                profile_file.as_ref(),
                &loaded.game,
                loaded.names.as_deref(),
            )?;
            let sched = build_schedule(&loaded.game, &prof);
            let results = json!({
                "profile": profile_json(&prof),
                "schedule": schedule_json(&sched, loaded.names.as_deref()),
            });
            let report = Report::new("simulate", &loaded.digest, None, results);
            emit(&report, common.out.as_ref())
        }
        Command::Solve { instance, algorithm, tie_break, common } => {
            let loaded = load_instance(&instance, common.numeric, common.tol)?;
            let tie = match tie_break {
                TieBreakChoice::LowestIndex => TieBreak::LowestIndex,
                TieBreakChoice::FewestJobs => TieBreak::FewestJobs,
                TieBreakChoice::LongerProcessing => TieBreak::LongerProcessing,
            };
            let (name, prof) = match algorithm {
                AlgorithmChoice::Symmetric => {
                    ("symmetric", solvers::solve_symmetric(&loaded.game)?)
                }
                AlgorithmChoice::TwoMachines => {
                    ("two_machines", solvers::solve_two_machines(&loaded.game)?)
                }
                AlgorithmChoice::Ls => ("ls", solvers::list_scheduling(&loaded.game, tie)?),
                AlgorithmChoice::Greedy => ("greedy", solvers::greedy_general(&loaded.game)?),
            };
            let sched = build_schedule(&loaded.game, &prof);
            let (stable, deviation) = equilibrium::is_nash(&loaded.game, &prof);
            let results = json!({
                "algorithm": name,
                "profile": profile_json(&prof),
                "schedule": schedule_json(&sched, loaded.names.as_deref()),
                "is_nash": stable,
                "deviation": deviation.map(|d| json!({
                    "job": d.job,
                    "from": d.from,
                    "to": d.to,
                    "old_cost": d.old_cost.to_string(),
                    "new_cost": d.new_cost.to_string(),
                })),
            });
            let report = Report::new("solve", &loaded.digest, None, results);
            emit(&report, common.out.as_ref())
        }
        Command::Analyze {
            instance,
            action,
            policy,
            seed,
            max_steps,
            profile,
            budget,
            common,
        } => {
            let loaded = load_instance(&instance, common.numeric, common.tol)?;
            let results = match action {
                AnalyzeAction::Enumerate => {
                    let nes = equilibrium::enumerate_ne(&loaded.game, budget)?;
                    let shown: Vec<Value> =
                        nes.iter().take(200).map(profile_json).collect();
                    json!({
                        "ne_count": nes.len(),
                        "ne_profiles": shown,
                        "truncated": nes.len() > 200,
                    })
                }
                AnalyzeAction::Poa => {
                    let rep = equilibrium::compute_poa_pos(&loaded.game, budget)?;
                    json!({
                        "ne_count": rep.ne_profiles.len(),
                        "no_ne": rep.poa.is_none(),
                        "opt_makespan": dual(&rep.opt_makespan),
                        "opt_profile": profile_json(&rep.opt_profile),
                        "max_ne_makespan": rep.ne_max.as_ref().map(|(ms, _)| dual(ms)),
                        "min_ne_makespan": rep.ne_min.as_ref().map(|(ms, _)| dual(ms)),
                        "poa": rep.poa.as_ref().map(dual),
                        "pos": rep.pos.as_ref().map(dual),
                    })
                }
                AnalyzeAction::Brd => {
                    let initial = match &profile {
                        Some(text) => parse_inline_profile(
                            text,
                            &loaded.game,
                            loaded.names.as_deref(),
                        )?,
                        None => Profile(vec![0; loaded.game.n()]),
                    };
                    let pol = match policy {
                        PolicyChoice::RoundRobin => ActivationPolicy::RoundRobin,
                        PolicyChoice::LowestIndex => ActivationPolicy::LowestIndexDeviator,
                        PolicyChoice::MaxGain => ActivationPolicy::MaxGain,
                        PolicyChoice::Random => {
                            ActivationPolicy::SeededRandom(seed.unwrap_or(0))
                        }
                    };
                    match equilibrium::brd(&loaded.game, &initial, pol, max_steps)? {
                        BrdOutcome::Converged { profile, steps } => {
                            let sched = build_schedule(&loaded.game, &profile);
                            json!({
                                "outcome": "converged",
                                "steps": steps,
                                "profile": profile_json(&profile),
                                "makespan": dual(&sched.makespan),
                            })
                        }
                        BrdOutcome::Cycle { profiles, entry_step } => json!({
                            "outcome": "cycle",
                            "entry_step": entry_step,
                            "cycle_length": profiles.len(),
                            "cycle_profiles": profiles.iter().map(profile_json).collect::<Vec<_>>(),
                        }),
                    }
                }
            };
            let report = Report::new("analyze", &loaded.digest, seed, results);
            emit(&report, common.out.as_ref())
        }
        Command::Generate {
            family,
            m,
            n,
            k,
            r,
            a,
            eps,
            b,
            big_b,
            tau,
            input,
            class,
            seed,
            out,
        } => {
            let built = build_family(
                family, m, n, k, r, a, eps, b, big_b, tau, input, class, seed,
            )?;
            let file = InstanceFile::from_game(
                &built.game,
                Some(&built.names),
                Some(built.meta),
            );
            let body = serde_json::to_string_pretty(&file)
                .map_err(|e| CliError::Io(e.to_string()))?;
            std::fs::write(&out, body + "\n")
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", out.display())))?;
            println!(
                "{}",
                json!({
                    "written": out.display().to_string(),
                    "jobs": built.game.n(),
                    "machines": built.game.m(),
                    "instance_digest": instance_digest(&file),
                })
            );
            Ok(())
        }
        Command::Mechanism { instance, policy, budget, common } => {
            let loaded = load_instance(&instance, common.numeric, common.tol)?;
            let results = run_mechanism(&loaded.game, policy, budget)?;
            let report = Report::new("mechanism", &loaded.digest, None, results);
            emit(&report, common.out.as_ref())
        }
    }
}

struct BuiltFamily {
    game: GameInstance,
    names: Vec<String>,
    meta: Value,
}

fn parse_rational_arg(s: Option<String>, what: &str) -> CliResult<Numeric> {
    let text = s.ok_or_else(|| CliError::Parse(format!("--{what} is required")))?;
    Numeric::parse_rational(&text)
        .map_err(|e| CliError::Parse(format!("--{what}: {e}")))
}

fn need<T>(v: Option<T>, what: &str) -> CliResult<T> {
    v.ok_or_else(|| CliError::Parse(format!("--{what} is required")))
}

#[allow(clippy::too_many_arguments)]
fn build_family(
    family: FamilyChoice,
    m: Option<usize>,
    n: Option<usize>,
    k: Option<usize>,
    r: Option<String>,
    a: Option<String>,
    eps: Option<String>,
    b: Option<f64>,
    big_b: Option<f64>,
    tau: Option<f64>,
    input: Option<PathBuf>,
    class: Option<ClassChoice>,
    seed: u64,
) -> CliResult<BuiltFamily> {
    let witness_meta = |fam: &generators::Family| {
        let mut extra = serde_json::Map::new();
        if let Some(ne) = &fam.ne_witness {
            extra.insert("ne_witness".into(), json!(ne.0));
        }
        if let Some(opt) = &fam.opt_witness {
            extra.insert("opt_witness".into(), json!(opt.0));
        }
        Value::Object(extra)
    };
    match family {
        FamilyChoice::NoNe2 => {
            let game = generators::gen_no_ne2();
            Ok(BuiltFamily {
                game,
                names: vec!["u".into(), "v".into()],
                meta: json!({ "family": "noNE2" }),
            })
        }
        FamilyChoice::NoNe3 => {
            let game = generators::gen_no_ne3();
            Ok(BuiltFamily {
                game,
                names: vec!["u".into(), "v".into(), "w".into()],
                meta: json!({ "family": "noNE3" }),
            })
        }
        FamilyChoice::PoaR => {
            let m = need(m, "m")?;
            let r = parse_rational_arg(r, "r")?;
            let fam = generators::gen_poa_r(m, &r)?;
            let meta = json!({
                "family": "poa_r",
                "params": { "m": m, "r": r.to_string() },
                "witnesses": witness_meta(&fam),
            });
            Ok(BuiltFamily { game: fam.game, names: fam.names, meta })
        }
        FamilyChoice::Exponential => {
            let m = need(m, "m")?;
            let k = need(k, "k")?;
            let a = parse_rational_arg(a, "a")?;
            let fam = generators::gen_exponential(m, k, &a)?;
            let meta = json!({
                "family": "exponential",
                "params": { "m": m, "k": k, "a": a.to_string() },
                "witnesses": witness_meta(&fam),
            });
            Ok(BuiltFamily { game: fam.game, names: fam.names, meta })
        }
        FamilyChoice::ArbLb => {
            let m = need(m, "m")?;
            let eps = parse_rational_arg(eps, "eps")?;
            let fam = generators::gen_arbitrary_lb(m, &eps)?;
            let meta = json!({
                "family": "arb_lb",
                "params": { "m": m, "eps": eps.to_string() },
                "witnesses": witness_meta(&fam),
            });
            Ok(BuiltFamily { game: fam.game, names: fam.names, meta })
        }
        FamilyChoice::GlobalLb => {
            let m = need(m, "m")?;
            let eps = parse_rational_arg(eps, "eps")?;
            let fam = generators::gen_global_lb(m, &eps)?;
            let meta = json!({
                "family": "global_lb",
                "params": { "m": m, "eps": eps.to_string() },
                "witnesses": witness_meta(&fam),
            });
            Ok(BuiltFamily { game: fam.game, names: fam.names, meta })
        }
        FamilyChoice::SdrLb => {
            let m = need(m, "m")?;
            let k = need(k, "k")?;
            let b = need(b, "b")?;
            let big_b = need(big_b, "big-b")?;
            let tau = need(tau, "tau")?;
            let a: f64 = a
                .as_deref()
                .ok_or_else(|| CliError::Parse("--a is required".into()))?
                .parse()
                .map_err(|_| CliError::Parse("--a must be a float here".into()))?;
            let fam = generators::gen_sdr_lb(b, a, big_b, tau, k, m)?;
            let meta = json!({
                "family": "sdr_lb",
                "params": { "m": m, "k": k, "b": b, "a": a, "B": big_b, "tau": tau },
                "witnesses": witness_meta(&fam),
            });
            Ok(BuiltFamily { game: fam.game, names: fam.names, meta })
        }
        FamilyChoice::SbptTight => {
            let fam = generators::gen_sbpt_tight();
            let meta = json!({ "family": "sbpt_tight", "witnesses": witness_meta(&fam) });
            Ok(BuiltFamily { game: fam.game, names: fam.names, meta })
        }
        FamilyChoice::Reduce3dm => {
            let path = need(input, "input")?;
            let text = read_file(&path)?;
            let inst = generators::ThreeDMInstance::parse(&text)?;
            let red = generators::reduce_3dm(&inst)?;
            let names = red.job_names();
            let meta = json!({
                "family": "reduce3dm",
                "params": { "n": inst.n, "triples": inst.triples },
            });
            Ok(BuiltFamily { game: red.game, names, meta })
        }
        FamilyChoice::Random => {
            let m = need(m, "m")?;
            let n = need(n, "n")?;
            let preset = need(class, "class")?;
            let (spec, params) = class_preset(preset);
            let game = generators::sample_random(&spec, n, m, seed, &params)?;
            let names = (0..n).map(|i| format!("j{i}")).collect();
            let meta = json!({
                "family": "random",
                "params": { "class": format!("{preset:?}"), "n": n, "m": m, "seed": seed },
            });
            Ok(BuiltFamily { game, names, meta })
        }
    }
}

fn class_preset(choice: ClassChoice) -> (GameClass, SampleParams) {
    let mut class = GameClass::default();
    let mut params = SampleParams::default();
    match choice {
        ClassChoice::Sym => class.symmetric = true,
        ClassChoice::TwoDa => {
            class.two_machines = true;
            class.delay_averse = true;
        }
        ClassChoice::PDa => {
            class.identical_speeds = true;
            class.delay_averse = true;
        }
        ClassChoice::Global => class.global_list = true,
        ClassChoice::PNegDa => {
            class.identical_speeds = true;
            class.all_negative = true;
            class.delay_averse = true;
        }
        ClassChoice::PglobalNegDa => {
            class.identical_speeds = true;
            class.all_negative = true;
            class.delay_averse = true;
            class.global_list = true;
        }
        ClassChoice::Sdr | ClassChoice::Lbdr => {
            class.identical_speeds = true;
            class.all_negative = true;
            class.delay_averse = true;
            params.uniform_tau = true;
            params.no_tau_reach = true;
        }
        ClassChoice::Sbpt => {
            class.identical_speeds = true;
            class.all_positive = true;
            params.uniform_rate = true;
        }
    }
    (class, params)
}

fn run_mechanism(
    game: &GameInstance,
    policy: MechanismChoice,
    budget: u64,
) -> CliResult<Value> {
    let kind = match policy {
        MechanismChoice::Sdr => PolicyKind::Sdr,
        MechanismChoice::SdrDynamic => PolicyKind::SdrDynamic,
        MechanismChoice::Lbdr => PolicyKind::Lbdr,
        MechanismChoice::Sbpt => PolicyKind::Sbpt,
    };
    let rate_for_bound = game.job(0).rate().clone();
    let bound = mechanisms::poa_bound(kind, game.m(), &rate_for_bound);

    let (priority, sched) = match kind {
        PolicyKind::SdrDynamic => {
            let sched = mechanisms::sdr_dynamic_schedule(game)?;
            (None, sched)
        }
        _ => {
            let list = match kind {
                PolicyKind::Sdr => mechanisms::sdr_priority(game)?,
                PolicyKind::Lbdr => {
                    let eps = mechanisms::default_lbdr_epsilon(game.mode());
                    mechanisms::lbdr_priority(game, &eps)?
                }
                PolicyKind::Sbpt => mechanisms::sbpt_priority(game)?,
                PolicyKind::SdrDynamic => unreachable!(),
            };
            let listed = game.replace_priorities(&list)?;
            let prof = solvers::list_scheduling(&listed, TieBreak::LowestIndex)?;
            (Some(list), build_schedule(&listed, &prof))
        }
    };

    // measured ratio against the brute-force optimum, when it fits the budget
    let listed_game = match &priority {
        Some(list) => game.replace_priorities(list)?,
        None => game.clone(),
    };
    let measured = match equilibrium::optimal_makespan(&listed_game, budget) {
        Ok((opt, _)) => Some((sched.makespan.clone(), opt)),
        Err(GameError::BudgetExceeded { .. }) => None,
        Err(e) => return Err(e.into()),
    };
    Ok(json!({
        "policy": format!("{policy:?}"),
        "priority": priority,
        "schedule_makespan": dual(&sched.makespan),
        "machine_sequences": sched.sequences,
        "measured_ratio": measured.as_ref().map(|(ne, opt)| dual(&(ne / opt))),
        "opt_makespan": measured.as_ref().map(|(_, opt)| dual(opt)),
        "theoretical_bound": dual(&bound),
    }))
}
