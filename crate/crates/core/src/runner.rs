//! Scenario execution: architecture + algorithm assignment + calendar → ledger.

use std::collections::BTreeMap;

use chrono::NaiveDate;

use crate::algorithm::{find_algorithm, SignatureAlgorithm};
use crate::error::{Error, Result};
use crate::repository::{Repository, RoleType, TickReport};
use crate::schedule::{parse_bool, EventCalendar, RoleAction, Tick};
use crate::table::Table;

pub const DEFAULT_DEVICE: &str = "Device_A";
pub const DEFAULT_TARGET: &str = "Target 1";

pub const REPORT_HEADER: [&str; 9] = [
    "Device",
    "Assignment",
    "Signature Bytes",
    "Public Key Bytes",
    "Total Bytes",
    "Verification Cost",
    "Total Signatures",
    "Rollover Events",
    "Root Publications",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleSpec {
    pub name: String,
    pub role_type: RoleType,
    /// `None` takes the algorithm from the run's assignment.
    pub algorithm: Option<String>,
    pub reserve: bool,
}

impl RoleSpec {
    pub fn new(name: impl Into<String>, role_type: RoleType) -> Self {
        Self {
            name: name.into(),
            role_type,
            algorithm: None,
            reserve: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Architecture {
    pub device_name: String,
    pub role_specs: Vec<RoleSpec>,
}

impl Architecture {
    pub fn new(device_name: impl Into<String>, role_specs: Vec<RoleSpec>) -> Result<Self> {
        let arch = Self {
            device_name: device_name.into(),
            role_specs,
        };
        arch.validate()?;
        Ok(arch)
    }

    /// One instance of each role, named "Root 1", "Timestamp 1", "Snapshot 1"
    /// and "Target 1".
    pub fn single_instance(device_name: impl Into<String>) -> Self {
        Self {
            device_name: device_name.into(),
            role_specs: RoleType::ALL
                .iter()
                .map(|t| RoleSpec::new(format!("{t} 1"), *t))
                .collect(),
        }
    }

    /// Every role type must have at least one instance.
    pub fn validate(&self) -> Result<()> {
        for role_type in RoleType::ALL {
            if !self.role_specs.iter().any(|s| s.role_type == role_type) {
                return Err(Error::Config(format!(
                    "architecture `{}` has no {role_type} role",
                    self.device_name
                )));
            }
        }
        if let Some(spec) = self.role_specs.iter().find(|s| s.name.is_empty()) {
            return Err(Error::Config(format!("unnamed {} role", spec.role_type)));
        }
        Ok(())
    }

    /// Parses a `Role Name,Role Type,Algorithm,Reserve` CSV.
    pub fn parse_csv(device_name: impl Into<String>, csv_text: &str) -> Result<Self> {
        let table = Table::parse(csv_text)?;
        let name_col = table.column("Role Name")?;
        let type_col = table.column("Role Type")?;
        let alg_col = table.optional_column("Algorithm");
        let reserve_col = table.optional_column("Reserve");
        let mut specs = Vec::new();
        for row in table.rows() {
            let name = row.get(name_col);
            if name.is_empty() {
                return Err(row.error("`Role Name` is empty"));
            }
            let role_type: RoleType = row
                .get(type_col)
                .parse()
                .map_err(|e: Error| row.error(e.to_string()))?;
            let algorithm = alg_col
                .map(|c| row.get(c))
                .filter(|a| !a.is_empty())
                .map(str::to_string);
            let reserve = match reserve_col.map(|c| row.get(c)).filter(|r| !r.is_empty()) {
                None => false,
                Some(r) => parse_bool(r)
                    .ok_or_else(|| row.error(format!("invalid `Reserve` value `{r}`")))?,
            };
            specs.push(RoleSpec {
                name: name.to_string(),
                role_type,
                algorithm,
                reserve,
            });
        }
        Self::new(device_name, specs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgorithmAssignment {
    /// One algorithm for every role that does not name its own.
    Uniform(String),
    /// Algorithms chosen per role name; roles absent from the map fall back
    /// to the algorithm named in the architecture.
    PerRole {
        label: String,
        map: BTreeMap<String, String>,
    },
}

impl AlgorithmAssignment {
    pub fn label(&self) -> &str {
        match self {
            AlgorithmAssignment::Uniform(name) => name,
            AlgorithmAssignment::PerRole { label, .. } => label,
        }
    }

    /// Parses a `Role Name,Algorithm` CSV.
    pub fn parse_per_role_csv(label: impl Into<String>, csv_text: &str) -> Result<Self> {
        let table = Table::parse(csv_text)?;
        let name_col = table.column("Role Name")?;
        let alg_col = table.column("Algorithm")?;
        let mut map = BTreeMap::new();
        for row in table.rows() {
            let (name, alg) = (row.get(name_col), row.get(alg_col));
            if name.is_empty() || alg.is_empty() {
                return Err(row.error("`Role Name` and `Algorithm` must both be set"));
            }
            if map.insert(name.to_string(), alg.to_string()).is_some() {
                return Err(row.error(format!("role `{name}` assigned twice")));
            }
        }
        Ok(AlgorithmAssignment::PerRole {
            label: label.into(),
            map,
        })
    }

    fn resolve<'c>(
        &self,
        role_name: &str,
        explicit: Option<&str>,
        catalog: &'c [SignatureAlgorithm],
    ) -> Result<&'c SignatureAlgorithm> {
        let chosen = match self {
            AlgorithmAssignment::Uniform(name) => explicit.or(Some(name.as_str())),
            AlgorithmAssignment::PerRole { map, .. } => {
                map.get(role_name).map(String::as_str).or(explicit)
            }
        };
        let name = chosen
            .ok_or_else(|| Error::Config(format!("no algorithm assigned to role `{role_name}`")))?;
        find_algorithm(name, catalog).map_err(|e| Error::Config(format!("role `{role_name}`: {e}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub device_name: String,
    pub assignment: String,
    pub sig_bytes: u64,
    pub pk_bytes: u64,
    pub total_bytes: u64,
    pub cost: f64,
    pub total_signatures: u64,
    pub rollover_events: u64,
    pub root_publications: u64,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
enum ResolvedAction {
    Add {
        name: String,
        role_type: RoleType,
        algorithm: SignatureAlgorithm,
    },
    Remove(String),
    SetReserve(String, bool),
}

/// What one [`Simulation::step`] did.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub report: TickReport,
    /// Set on the first tick of a date that applied events or actions.
    pub applied_date: Option<NaiveDate>,
    /// Targets staged on this tick, with the number of roles each matched.
    pub staged: Vec<(String, usize)>,
}

/// A repository driven tick by tick through a calendar.
///
/// On the first tick of each date, role actions and then update events dated
/// after the previous tick's date and up to this date are applied; then a
/// timestamp is published. Items dated before the first tick or after the
/// last tick are never applied.
#[derive(Debug, Clone)]
pub struct Simulation {
    repo: Repository,
    label: String,
    events: Vec<(NaiveDate, String)>,
    actions: Vec<(NaiveDate, ResolvedAction)>,
    next_event: usize,
    next_action: usize,
    last_date: Option<NaiveDate>,
    warnings: Vec<String>,
}

impl Simulation {
    /// Resolves every algorithm up front, so configuration errors surface
    /// before any tick runs.
    pub fn new(
        arch: &Architecture,
        assignment: &AlgorithmAssignment,
        calendar: &EventCalendar,
        catalog: &[SignatureAlgorithm],
    ) -> Result<Self> {
        arch.validate()?;
        let mut repo = Repository::new(arch.device_name.clone());
        for spec in &arch.role_specs {
            let alg = assignment.resolve(&spec.name, spec.algorithm.as_deref(), catalog)?;
            repo.add_role(&spec.name, spec.role_type, alg.clone());
            if spec.reserve {
                repo.set_reserve(&spec.name, true);
            }
        }
        let actions = calendar
            .role_actions
            .iter()
            .map(|(date, action)| {
                let resolved = match action {
                    RoleAction::Add {
                        name,
                        role_type,
                        algorithm,
                    } => ResolvedAction::Add {
                        name: name.clone(),
                        role_type: *role_type,
                        algorithm: assignment
                            .resolve(name, algorithm.as_deref(), catalog)?
                            .clone(),
                    },
                    RoleAction::Remove { name } => ResolvedAction::Remove(name.clone()),
                    RoleAction::SetReserve { name, flag } => {
                        ResolvedAction::SetReserve(name.clone(), *flag)
                    }
                };
                Ok((*date, resolved))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            repo,
            label: assignment.label().to_string(),
            events: calendar.update_events.iter().cloned().collect(),
            actions,
            next_event: 0,
            next_action: 0,
            last_date: None,
            warnings: Vec::new(),
        })
    }

    pub fn repository(&self) -> &Repository {
        &self.repo
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn step(&mut self, tick: Tick) -> Result<StepOutcome> {
        let mut outcome = StepOutcome {
            report: TickReport::default(),
            applied_date: None,
            staged: Vec::new(),
        };
        match self.last_date {
            Some(last) if tick.date < last => {
                return Err(Error::Config(format!(
                    "ticks out of order: {} after {last}",
                    tick.date
                )));
            }
            Some(last) if tick.date == last => {}
            _ => self.enter_date(tick.date, &mut outcome),
        }
        outcome.report = self.repo.publish_timestamp();
        Ok(outcome)
    }

    fn enter_date(&mut self, date: NaiveDate, outcome: &mut StepOutcome) {
        let first_day = self.last_date.is_none();
        self.last_date = Some(date);
        let in_window = |d: NaiveDate| d <= date;
        let before_start = |d: NaiveDate| first_day && d < date;

        let counts_before = RoleType::ALL.map(|t| self.repo.count_of(t));
        while let Some((d, action)) = self.actions.get(self.next_action) {
            if before_start(*d) {
                self.next_action += 1;
                continue;
            }
            if !in_window(*d) {
                break;
            }
            let (d, action) = (*d, action.clone());
            self.next_action += 1;
            outcome.applied_date = Some(date);
            match action {
                ResolvedAction::Add {
                    name,
                    role_type,
                    algorithm,
                } => self.repo.add_role(&name, role_type, algorithm),
                ResolvedAction::Remove(name) => {
                    if self.repo.remove_role(&name) == 0 {
                        self.warnings
                            .push(format!("{d}: remove of `{name}` matched no role"));
                    }
                }
                ResolvedAction::SetReserve(name, flag) => {
                    if self.repo.set_reserve(&name, flag) == 0 {
                        self.warnings
                            .push(format!("{d}: reserve of `{name}` matched no role"));
                    }
                }
            }
        }
        for (i, role_type) in RoleType::ALL.into_iter().enumerate() {
            if counts_before[i] > 0 && self.repo.count_of(role_type) == 0 {
                self.warnings
                    .push(format!("{date}: no {role_type} role remains"));
            }
        }

        while let Some((d, target)) = self.events.get(self.next_event) {
            if before_start(*d) {
                self.next_event += 1;
                continue;
            }
            if !in_window(*d) {
                break;
            }
            let (d, target) = (*d, target.clone());
            self.next_event += 1;
            outcome.applied_date = Some(date);
            let matched = self.repo.stage_update(&target);
            if matched == 0 {
                self.warnings
                    .push(format!("{d}: update for `{target}` matched no Target role"));
            }
            outcome.staged.push((target, matched));
        }
    }

    pub fn finish(self) -> RunResult {
        let totals = self.repo.ledger_totals();
        RunResult {
            device_name: totals.name,
            assignment: self.label,
            sig_bytes: totals.sig_bytes,
            pk_bytes: totals.pk_bytes,
            total_bytes: totals.total_bytes,
            cost: totals.cost,
            total_signatures: totals.signatures,
            rollover_events: totals.rollover_events,
            root_publications: totals.root_publications,
            warnings: self.warnings,
        }
    }
}

pub fn run_scenario(
    arch: &Architecture,
    assignment: &AlgorithmAssignment,
    calendar: &EventCalendar,
    ticks: &[Tick],
    catalog: &[SignatureAlgorithm],
) -> Result<RunResult> {
    run_scenario_with(arch, assignment, calendar, ticks, catalog, |_, _| {})
}

/// Like [`run_scenario`], calling `observe` after every tick.
pub fn run_scenario_with(
    arch: &Architecture,
    assignment: &AlgorithmAssignment,
    calendar: &EventCalendar,
    ticks: &[Tick],
    catalog: &[SignatureAlgorithm],
    mut observe: impl FnMut(&Simulation, &StepOutcome),
) -> Result<RunResult> {
    let mut sim = Simulation::new(arch, assignment, calendar, catalog)?;
    for tick in ticks {
        let outcome = sim.step(*tick)?;
        observe(&sim, &outcome);
    }
    Ok(sim.finish())
}

/// One fresh run per assignment, in input order.
pub fn run_sweep(
    arch: &Architecture,
    assignments: &[AlgorithmAssignment],
    calendar: &EventCalendar,
    ticks: &[Tick],
    catalog: &[SignatureAlgorithm],
) -> Result<Vec<RunResult>> {
    run_sweep_with(arch, assignments, calendar, ticks, catalog, |_, _, _| {})
}

pub fn run_sweep_with(
    arch: &Architecture,
    assignments: &[AlgorithmAssignment],
    calendar: &EventCalendar,
    ticks: &[Tick],
    catalog: &[SignatureAlgorithm],
    mut observe: impl FnMut(&AlgorithmAssignment, &Simulation, &StepOutcome),
) -> Result<Vec<RunResult>> {
    if assignments.is_empty() {
        return Err(Error::Config("no algorithm assignments to run".into()));
    }
    // Resolve everything before running anything.
    for assignment in assignments {
        Simulation::new(arch, assignment, calendar, catalog)?;
    }
    assignments
        .iter()
        .map(|a| {
            run_scenario_with(arch, a, calendar, ticks, catalog, |sim, out| {
                observe(a, sim, out)
            })
        })
        .collect()
}

/// One report row, as written to and read back from the report CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub device_name: String,
    pub assignment: String,
    pub sig_bytes: u64,
    pub pk_bytes: u64,
    pub total_bytes: u64,
    /// Verification cost, as printed (6 decimal places).
    pub cost: String,
    pub total_signatures: u64,
    pub rollover_events: u64,
    pub root_publications: u64,
}

impl From<&RunResult> for ReportRow {
    fn from(r: &RunResult) -> Self {
        Self {
            device_name: r.device_name.clone(),
            assignment: r.assignment.clone(),
            sig_bytes: r.sig_bytes,
            pk_bytes: r.pk_bytes,
            total_bytes: r.total_bytes,
            cost: format!("{:.6}", r.cost),
            total_signatures: r.total_signatures,
            rollover_events: r.rollover_events,
            root_publications: r.root_publications,
        }
    }
}

pub fn emit_report_csv(results: &[RunResult]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let write = |writer: &mut csv::Writer<Vec<u8>>| -> csv::Result<()> {
        writer.write_record(REPORT_HEADER)?;
        for row in results.iter().map(ReportRow::from) {
            writer.write_record([
                row.device_name,
                row.assignment,
                row.sig_bytes.to_string(),
                row.pk_bytes.to_string(),
                row.total_bytes.to_string(),
                row.cost,
                row.total_signatures.to_string(),
                row.rollover_events.to_string(),
                row.root_publications.to_string(),
            ])?;
        }
        writer.flush()?;
        Ok(())
    };
    write(&mut writer).expect("writing to memory cannot fail");
    String::from_utf8(writer.into_inner().expect("in-memory flush"))
        .expect("csv writer emits utf-8")
}

pub fn parse_report_csv(csv_text: &str) -> Result<Vec<ReportRow>> {
    let table = Table::parse(csv_text)?;
    let cols = REPORT_HEADER
        .iter()
        .map(|h| table.column(h))
        .collect::<Result<Vec<_>>>()?;
    table
        .rows()
        .map(|row| {
            let int = |i: usize| {
                row.get(cols[i])
                    .parse::<u64>()
                    .map_err(|_| row.error(format!("`{}` is not an integer", REPORT_HEADER[i])))
            };
            let cost = row.get(cols[5]);
            cost.parse::<f64>()
                .map_err(|_| row.error("`Verification Cost` is not a number"))?;
            Ok(ReportRow {
                device_name: row.get(cols[0]).to_string(),
                assignment: row.get(cols[1]).to_string(),
                sig_bytes: int(2)?,
                pk_bytes: int(3)?,
                total_bytes: int(4)?,
                cost: cost.to_string(),
                total_signatures: int(6)?,
                rollover_events: int(7)?,
                root_publications: int(8)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::{generate_ticks, parse_date, Cadence};

    fn d(s: &str) -> NaiveDate {
        parse_date(s).unwrap()
    }

    fn catalog(max_sigs: u64) -> Vec<SignatureAlgorithm> {
        vec![SignatureAlgorithm::new("AlgA", 100, 50, max_sigs, 1.0).unwrap()]
    }

    fn ten_days() -> (Vec<Tick>, EventCalendar) {
        let ticks = generate_ticks(d("2020-01-01"), d("2020-01-10"), Cadence::Daily).unwrap();
        let mut cal = EventCalendar::new();
        cal.add_event(d("2020-01-03"), "Target 1");
        cal.add_event(d("2020-01-07"), "Target 1");
        (ticks, cal)
    }

    fn totals(r: &RunResult) -> (u64, u64, u64, u64, u64, u64) {
        (
            r.total_signatures,
            r.sig_bytes,
            r.pk_bytes,
            r.total_bytes,
            r.rollover_events,
            r.root_publications,
        )
    }

    #[test]
    fn ten_day_trace() {
        let (ticks, cal) = ten_days();
        let arch = Architecture::single_instance(DEFAULT_DEVICE);
        let r = run_scenario(
            &arch,
            &AlgorithmAssignment::Uniform("AlgA".into()),
            &cal,
            &ticks,
            &catalog(1_000_000),
        )
        .unwrap();
        assert_eq!(totals(&r), (17, 1700, 200, 1900, 4, 1));
        assert!((r.cost - 17.0).abs() < 1e-6);
        assert!(r.warnings.is_empty());
        assert_eq!(
            emit_report_csv(&[r]),
            "Device,Assignment,Signature Bytes,Public Key Bytes,Total Bytes,Verification Cost,Total Signatures,Rollover Events,Root Publications\n\
             Device_A,AlgA,1700,200,1900,17.000000,17,4,1\n"
        );
    }

    #[test]
    fn ten_day_trace_with_rollover() {
        let (ticks, cal) = ten_days();
        let arch = Architecture::single_instance(DEFAULT_DEVICE);
        let r = run_scenario(
            &arch,
            &AlgorithmAssignment::Uniform("AlgA".into()),
            &cal,
            &ticks,
            &catalog(4),
        )
        .unwrap();
        assert_eq!(totals(&r), (19, 1900, 600, 2500, 6, 3));
        assert!((r.cost - 19.0).abs() < 1e-6);
    }

    #[test]
    fn zero_ticks() {
        let arch = Architecture::single_instance(DEFAULT_DEVICE);
        let r = run_scenario(
            &arch,
            &AlgorithmAssignment::Uniform("AlgA".into()),
            &EventCalendar::new(),
            &[],
            &catalog(5),
        )
        .unwrap();
        assert_eq!(totals(&r), (0, 0, 0, 0, 0, 0));
        assert_eq!(r.cost, 0.0);
    }

    #[test]
    fn unknown_algorithm_fails_before_running() {
        let arch = Architecture::single_instance(DEFAULT_DEVICE);
        let err = run_scenario(
            &arch,
            &AlgorithmAssignment::Uniform("Nope".into()),
            &EventCalendar::new(),
            &[],
            &catalog(5),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(err
            .to_string()
            .contains("Requested algorithm type not found."));

        let mut cal = EventCalendar::new();
        cal.add_action(
            d("2020-01-02"),
            RoleAction::Add {
                name: "Root 2".into(),
                role_type: RoleType::Root,
                algorithm: Some("Nope".into()),
            },
        );
        let ticks = generate_ticks(d("2020-01-01"), d("2020-01-03"), Cadence::Daily).unwrap();
        let err = run_scenario(
            &arch,
            &AlgorithmAssignment::Uniform("AlgA".into()),
            &cal,
            &ticks,
            &catalog(5),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn architecture_requires_every_role_type() {
        let specs = vec![
            RoleSpec::new("Root 1", RoleType::Root),
            RoleSpec::new("Timestamp 1", RoleType::Timestamp),
            RoleSpec::new("Target 1", RoleType::Target),
        ];
        let err = Architecture::new("D", specs).unwrap_err();
        assert!(err.to_string().contains("Snapshot"));
    }

    #[test]
    fn architecture_csv() {
        let text = "Role Name,Role Type,Algorithm,Reserve\n\
                    Root 1,Root,AlgB,\n\
                    Timestamp 1,Timestamp,,false\n\
                    Timestamp 2,Timestamp,,true\n\
                    Snapshot 1,Snapshot,,\n\
                    Target 1,Target,,\n";
        let arch = Architecture::parse_csv("D", text).unwrap();
        assert_eq!(arch.role_specs.len(), 5);
        assert_eq!(arch.role_specs[0].algorithm.as_deref(), Some("AlgB"));
        assert!(arch.role_specs[2].reserve);
        assert!(Architecture::parse_csv("D", "Role Name,Role Type\nX,Mirror\n").is_err());
        assert!(
            Architecture::parse_csv("D", "Role Name,Role Type,Reserve\nX,Root,perhaps\n").is_err()
        );
    }

    #[test]
    fn explicit_architecture_algorithm_survives_uniform_sweep() {
        let mut cat = catalog(1_000_000);
        cat.push(SignatureAlgorithm::new("AlgB", 1000, 500, 1_000_000, 10.0).unwrap());
        let mut arch = Architecture::single_instance("D");
        arch.role_specs[0].algorithm = Some("AlgB".into());
        let r = run_scenario(
            &arch,
            &AlgorithmAssignment::Uniform("AlgA".into()),
            &EventCalendar::new(),
            &generate_ticks(d("2020-01-01"), d("2020-01-01"), Cadence::Daily).unwrap(),
            &cat,
        )
        .unwrap();
        // Root with AlgB, three others with AlgA.
        assert_eq!(r.sig_bytes, 1000 + 3 * 100);
        assert_eq!(r.pk_bytes, 500 + 3 * 50);
    }

    #[test]
    fn per_role_assignment() {
        let cat = vec![
            SignatureAlgorithm::new("R", 1000, 1, 1_000_000, 1.0).unwrap(),
            SignatureAlgorithm::new("T", 200, 2, 1_000_000, 2.0).unwrap(),
            SignatureAlgorithm::new("S", 30, 3, 1_000_000, 3.0).unwrap(),
            SignatureAlgorithm::new("G", 4, 4, 1_000_000, 4.0).unwrap(),
        ];
        let assignment = AlgorithmAssignment::parse_per_role_csv(
            "mixed",
            "Role Name,Algorithm\nRoot 1,R\nTimestamp 1,T\nSnapshot 1,S\nTarget 1,G\n",
        )
        .unwrap();
        let (ticks, cal) = ten_days();
        let arch = Architecture::single_instance("D");
        let mut sim = Simulation::new(&arch, &assignment, &cal, &cat).unwrap();
        for t in &ticks {
            sim.step(*t).unwrap();
        }
        let expected: u64 = sim
            .repository()
            .roles()
            .iter()
            .map(|r| r.lifetime_sigs * r.algorithm.sig_size)
            .sum();
        let r = sim.finish();
        assert_eq!(r.assignment, "mixed");
        assert_eq!(r.sig_bytes, expected);
        assert_eq!(r.sig_bytes, 1000 + 10 * 200 + 3 * 30 + 3 * 4);

        let partial = AlgorithmAssignment::PerRole {
            label: "p".into(),
            map: BTreeMap::new(),
        };
        assert!(matches!(
            run_scenario(&arch, &partial, &cal, &ticks, &cat),
            Err(Error::Config(_))
        ));
        assert!(
            AlgorithmAssignment::parse_per_role_csv("x", "Role Name,Algorithm\nA,R\nA,T\n")
                .is_err()
        );
    }

    #[test]
    fn unknown_target_warns() {
        let ticks = generate_ticks(d("2020-01-01"), d("2020-01-05"), Cadence::Daily).unwrap();
        let mut cal = EventCalendar::new();
        cal.add_event(d("2020-01-03"), "Target X");
        let r = run_scenario(
            &Architecture::single_instance("D"),
            &AlgorithmAssignment::Uniform("AlgA".into()),
            &cal,
            &ticks,
            &catalog(100),
        )
        .unwrap();
        assert_eq!(r.warnings.len(), 1);
        assert!(r.warnings[0].contains("Target X"));
        // Only the first-tick Target/Snapshot pair plus root and timestamps.
        assert_eq!(r.total_signatures, 5 + 3);
    }

    #[test]
    fn removing_last_role_of_a_type_warns() {
        let ticks = generate_ticks(d("2020-01-01"), d("2020-01-05"), Cadence::Daily).unwrap();
        let mut cal = EventCalendar::new();
        cal.add_action(
            d("2020-01-03"),
            RoleAction::Remove {
                name: "Snapshot 1".into(),
            },
        );
        let r = run_scenario(
            &Architecture::single_instance("D"),
            &AlgorithmAssignment::Uniform("AlgA".into()),
            &cal,
            &ticks,
            &catalog(100),
        )
        .unwrap();
        assert_eq!(r.warnings, ["2020-01-03: no Snapshot role remains"]);
        assert_eq!(r.root_publications, 2);
    }

    #[test]
    fn hourly_events_apply_once_per_date() {
        let ticks = generate_ticks(d("2020-01-01"), d("2020-01-03"), Cadence::Hourly).unwrap();
        let mut cal = EventCalendar::new();
        cal.add_event(d("2020-01-02"), "Target 1");
        let mut applied = Vec::new();
        let r = run_scenario_with(
            &Architecture::single_instance("D"),
            &AlgorithmAssignment::Uniform("AlgA".into()),
            &cal,
            &ticks,
            &catalog(1_000_000),
            |_, out| {
                if let Some(date) = out.applied_date {
                    applied.push(date);
                }
            },
        )
        .unwrap();
        assert_eq!(applied, [d("2020-01-02")]);
        assert_eq!(r.total_signatures, 72 + 3 + 2);
    }

    #[test]
    fn weekly_cadence_carries_events_to_next_tick() {
        let ticks = generate_ticks(d("2020-01-01"), d("2020-01-29"), Cadence::Weekly).unwrap();
        let mut cal = EventCalendar::new();
        cal.add_event(d("2020-01-03"), "Target 1");
        cal.add_event(d("2020-01-05"), "Target 1");
        cal.add_event(d("2020-01-30"), "Target 1");
        let r = run_scenario(
            &Architecture::single_instance("D"),
            &AlgorithmAssignment::Uniform("AlgA".into()),
            &cal,
            &ticks,
            &catalog(1_000_000),
        )
        .unwrap();
        // 5 ticks; both early-January events land on the 01-08 tick.
        assert_eq!(r.total_signatures, 5 + 3 + 2);
    }

    #[test]
    fn events_before_start_are_ignored() {
        let ticks = generate_ticks(d("2020-01-05"), d("2020-01-06"), Cadence::Daily).unwrap();
        let mut cal = EventCalendar::new();
        cal.add_event(d("2020-01-01"), "Target 1");
        cal.add_action(
            d("2020-01-01"),
            RoleAction::Remove {
                name: "Target 1".into(),
            },
        );
        let r = run_scenario(
            &Architecture::single_instance("D"),
            &AlgorithmAssignment::Uniform("AlgA".into()),
            &cal,
            &ticks,
            &catalog(1_000_000),
        )
        .unwrap();
        assert_eq!(r.total_signatures, 2 + 3);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn out_of_order_ticks_rejected() {
        let mut ticks = generate_ticks(d("2020-01-01"), d("2020-01-03"), Cadence::Daily).unwrap();
        ticks.swap(0, 2);
        let err = run_scenario(
            &Architecture::single_instance("D"),
            &AlgorithmAssignment::Uniform("AlgA".into()),
            &EventCalendar::new(),
            &ticks,
            &catalog(10),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn sweep_cases() {
        let cat = vec![
            SignatureAlgorithm::new("A", 10, 5, 1_000_000, 0.5).unwrap(),
            SignatureAlgorithm::new("B", 100, 50, 1_000_000, 1.5).unwrap(),
            SignatureAlgorithm::new("C", 1000, 500, 1_000_000, 2.5).unwrap(),
        ];
        let (ticks, cal) = ten_days();
        let arch = Architecture::single_instance("D");
        let assignments: Vec<_> = cat
            .iter()
            .map(|a| AlgorithmAssignment::Uniform(a.name.clone()))
            .collect();
        let rows = run_sweep(&arch, &assignments, &cal, &ticks, &cat).unwrap();
        assert_eq!(
            rows.iter()
                .map(|r| r.assignment.as_str())
                .collect::<Vec<_>>(),
            ["A", "B", "C"]
        );
        assert!(rows.iter().all(|r| r.total_signatures == 17));
        assert_eq!(
            rows.iter().map(|r| r.sig_bytes).collect::<Vec<_>>(),
            [170, 1700, 17000]
        );
        for (a, r) in assignments.iter().zip(&rows) {
            assert_eq!(&run_scenario(&arch, a, &cal, &ticks, &cat).unwrap(), r);
        }
        assert!(matches!(
            run_sweep(&arch, &[], &cal, &ticks, &cat),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn report_header_only_and_round_trip() {
        let empty = emit_report_csv(&[]);
        assert_eq!(empty.lines().count(), 1);
        assert!(parse_report_csv(&empty).unwrap().is_empty());

        let result = RunResult {
            device_name: "Device, \"quoted\"".into(),
            assignment: "LMS_SHA256_M32_H10".into(),
            sig_bytes: 123_456,
            pk_bytes: 789,
            total_bytes: 124_245,
            cost: 1.0 / 3.0,
            total_signatures: 42,
            rollover_events: 7,
            root_publications: 3,
            warnings: vec![],
        };
        let text = emit_report_csv(std::slice::from_ref(&result));
        let rows = parse_report_csv(&text).unwrap();
        assert_eq!(rows, [ReportRow::from(&result)]);
        assert_eq!(rows[0].cost, "0.333333");
    }
}
