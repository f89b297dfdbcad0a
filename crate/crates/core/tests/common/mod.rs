#![allow(dead_code)]

use chrono::{Days, NaiveDate};
use rand::seq::SliceRandom;
use rand::Rng;

use tuf_costsim::repository::LedgerTotals;
use tuf_costsim::runner::StepOutcome;
use tuf_costsim::{
    generate_ticks, AlgorithmAssignment, Architecture, Cadence, EventCalendar, RoleAction,
    RoleSpec, RoleType, SignatureAlgorithm, Simulation, Tick,
};

pub fn date(s: &str) -> NaiveDate {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap()
}

pub fn base_date() -> NaiveDate {
    date("2020-01-01")
}

pub fn daily_ticks(days: u64) -> Vec<Tick> {
    let start = base_date();
    generate_ticks(start, start + Days::new(days - 1), Cadence::Daily).unwrap()
}

pub fn uniform_catalog(max_sigs: u64) -> Vec<SignatureAlgorithm> {
    vec![SignatureAlgorithm::new("AlgA", 100, 50, max_sigs, 1.0).unwrap()]
}

pub fn uniform(name: &str) -> AlgorithmAssignment {
    AlgorithmAssignment::Uniform(name.to_string())
}

/// Ten daily ticks from 2020-01-01 with updates to "Target 1" on the 3rd and 7th.
pub fn ten_day_scenario() -> (Vec<Tick>, EventCalendar) {
    let mut cal = EventCalendar::new();
    cal.add_event(date("2020-01-03"), "Target 1");
    cal.add_event(date("2020-01-07"), "Target 1");
    (daily_ticks(10), cal)
}

pub struct Scenario {
    pub arch: Architecture,
    pub assignment: AlgorithmAssignment,
    pub calendar: EventCalendar,
    pub ticks: Vec<Tick>,
    pub catalog: Vec<SignatureAlgorithm>,
}

const NAME_POOL: [&str; 8] = [
    "Root 1",
    "Root 2",
    "Timestamp 1",
    "Timestamp 2",
    "Snapshot 1",
    "Snapshot 2",
    "Target 1",
    "Target 2",
];

/// A scenario with small key budgets and random role churn.
pub fn random_churn_scenario(rng: &mut impl Rng) -> Scenario {
    let maxes = [1u64, 2, 3, 5];
    let catalog: Vec<_> = maxes
        .iter()
        .map(|m| {
            SignatureAlgorithm::new(
                format!("M{m}"),
                rng.gen_range(1..5000),
                rng.gen_range(1..3000),
                *m,
                rng.gen_range(0..1000) as f64 / 64.0,
            )
            .unwrap()
        })
        .collect();
    let alg_name = |rng: &mut dyn rand::RngCore| format!("M{}", maxes.choose(rng).unwrap());

    let mut specs = Vec::new();
    for role_type in RoleType::ALL {
        for i in 1..=rng.gen_range(1..=2) {
            specs.push(RoleSpec {
                name: format!("{role_type} {i}"),
                role_type,
                algorithm: Some(alg_name(rng)),
                reserve: i > 1 && rng.gen_bool(0.3),
            });
        }
    }
    let arch = Architecture::new("Fuzz", specs).unwrap();

    let days: u64 = rng.gen_range(1..=90);
    let ticks = daily_ticks(days);
    let mut calendar = EventCalendar::new();
    for _ in 0..rng.gen_range(0..=days / 2 + 1) {
        let d = base_date() + Days::new(rng.gen_range(0..days));
        let target = ["Target 1", "Target 2", "Target 3"].choose(rng).unwrap();
        calendar.add_event(d, *target);
    }
    for _ in 0..rng.gen_range(0..=6) {
        let d = base_date() + Days::new(rng.gen_range(0..days));
        let name = NAME_POOL.choose(rng).unwrap().to_string();
        let action = match rng.gen_range(0..3) {
            0 => {
                let role_type = name.split(' ').next().unwrap().parse().unwrap();
                let algorithm = Some(alg_name(rng));
                RoleAction::Add {
                    name,
                    role_type,
                    algorithm,
                }
            }
            1 => RoleAction::Remove { name },
            _ => RoleAction::SetReserve {
                name,
                flag: rng.gen_bool(0.5),
            },
        };
        calendar.add_action(d, action);
    }
    Scenario {
        arch,
        assignment: AlgorithmAssignment::Uniform("M5".into()),
        calendar,
        ticks,
        catalog,
    }
}

/// Checks every per-tick invariant; returns a description of the first
/// violation.
pub fn check_tick(
    sim: &Simulation,
    outcome: &StepOutcome,
    previous: &LedgerTotals,
) -> Result<LedgerTotals, String> {
    let repo = sim.repository();
    let now = repo.ledger_totals();
    for role in repo.roles() {
        if role.num_sigs > role.algorithm.max_sigs {
            return Err(format!(
                "{} has {} > {} signatures",
                role.name, role.num_sigs, role.algorithm.max_sigs
            ));
        }
        if role.lifetime_sigs < role.num_sigs {
            return Err(format!("{} lifetime below current count", role.name));
        }
    }
    let live: u64 = repo.roles().iter().map(|r| r.lifetime_sigs).sum();
    if now.signatures != live + repo.retired_sigs() {
        return Err(format!(
            "conservation: {} != {} + {}",
            now.signatures,
            live,
            repo.retired_sigs()
        ));
    }
    if now.sig_bytes < previous.sig_bytes
        || now.pk_bytes < previous.pk_bytes
        || now.cost < previous.cost
        || now.signatures < previous.signatures
        || now.rollover_events < previous.rollover_events
        || now.root_publications < previous.root_publications
    {
        return Err("an accumulator decreased".into());
    }
    let r = &outcome.report;
    if now.sig_bytes - previous.sig_bytes != r.sig_bytes
        || now.pk_bytes - previous.pk_bytes != r.pk_bytes
        || now.signatures - previous.signatures != r.signatures()
        || now.rollover_events - previous.rollover_events != r.rolled_roles
        || (now.cost - previous.cost - r.cost).abs() > 1e-6
    {
        return Err("tick report does not match ledger deltas".into());
    }
    let key_bytes: u64 = repo.roles().iter().map(|r| r.algorithm.pk_size).sum();
    let expected_pk = if r.root_published { key_bytes } else { 0 };
    if r.pk_bytes != expected_pk {
        return Err(format!("pk delta {} != {}", r.pk_bytes, expected_pk));
    }
    Ok(now)
}

/// Runs `scenario`, checking invariants after every tick.
pub fn run_checked(scenario: &Scenario) -> Result<tuf_costsim::RunResult, String> {
    let mut sim = Simulation::new(
        &scenario.arch,
        &scenario.assignment,
        &scenario.calendar,
        &scenario.catalog,
    )
    .map_err(|e| e.to_string())?;
    let mut previous = sim.repository().ledger_totals();
    for tick in &scenario.ticks {
        let outcome = sim.step(*tick).map_err(|e| e.to_string())?;
        previous =
            check_tick(&sim, &outcome, &previous).map_err(|e| format!("{}: {e}", tick.date))?;
    }
    Ok(sim.finish())
}

/// Closed-form signature count for one non-reserve instance per role when no
/// key is ever exhausted: every tick signs a timestamp, the first tick also
/// signs root, target and snapshot, and each later event date adds a target
/// and a snapshot signature.
pub fn closed_form_signatures(tick_dates: &[NaiveDate], event_dates: &[NaiveDate]) -> u64 {
    let d = tick_dates.len() as u64;
    if d == 0 {
        return 0;
    }
    let mut events: Vec<NaiveDate> = event_dates
        .iter()
        .copied()
        .filter(|e| tick_dates.contains(e))
        .collect();
    events.sort();
    events.dedup();
    let e = events.len() as u64;
    let e1 = u64::from(events.contains(&tick_dates[0]));
    d + 3 + 2 * (e - e1)
}
