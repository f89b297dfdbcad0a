//! Tick calendars, update events and scripted role changes.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::{Days, NaiveDate};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};
use crate::repository::RoleType;
use crate::table::Table;

pub const DATE_FORMAT: &str = "%Y-%m-%d";

/// How often a timestamp is published.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Cadence {
    /// One tick on the start date and every seventh date after it.
    Weekly,
    #[default]
    Daily,
    Hourly,
    Minute,
}

impl Cadence {
    /// Ticks on each date that carries ticks.
    pub fn ticks_per_date(self) -> u32 {
        match self {
            Cadence::Weekly | Cadence::Daily => 1,
            Cadence::Hourly => 24,
            Cadence::Minute => 1440,
        }
    }

    fn date_stride(self) -> u64 {
        match self {
            Cadence::Weekly => 7,
            _ => 1,
        }
    }
}

impl FromStr for Cadence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weekly" => Ok(Cadence::Weekly),
            "daily" => Ok(Cadence::Daily),
            "hourly" => Ok(Cadence::Hourly),
            "minute" | "per-minute" => Ok(Cadence::Minute),
            other => Err(Error::Parameter(format!(
                "unknown cadence `{other}` (expected weekly, daily, hourly or minute)"
            ))),
        }
    }
}

impl fmt::Display for Cadence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Cadence::Weekly => "weekly",
            Cadence::Daily => "daily",
            Cadence::Hourly => "hourly",
            Cadence::Minute => "minute",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tick {
    pub date: NaiveDate,
    /// Position within the date; always below [`Cadence::ticks_per_date`].
    pub sub_index: u32,
}

/// Publication instants from `start` to `end`, both inclusive.
pub fn generate_ticks(start: NaiveDate, end: NaiveDate, cadence: Cadence) -> Result<Vec<Tick>> {
    let dates = date_range(start, end, cadence.date_stride())?;
    let per_date = cadence.ticks_per_date();
    let mut ticks = Vec::with_capacity(dates.len() * per_date as usize);
    for date in dates {
        ticks.extend((0..per_date).map(|sub_index| Tick { date, sub_index }));
    }
    Ok(ticks)
}

fn date_range(start: NaiveDate, end: NaiveDate, stride: u64) -> Result<Vec<NaiveDate>> {
    if start > end {
        return Err(Error::Range { start, end });
    }
    let span = (end - start).num_days() as u64;
    Ok((0..=span / stride)
        .map(|n| start + Days::new(n * stride))
        .collect())
}

/// A scripted change to the role set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RoleAction {
    /// An empty `algorithm` is filled in from the run's algorithm assignment.
    Add {
        name: String,
        role_type: RoleType,
        algorithm: Option<String>,
    },
    Remove {
        name: String,
    },
    SetReserve {
        name: String,
        flag: bool,
    },
}

impl RoleAction {
    pub fn name(&self) -> &str {
        match self {
            RoleAction::Add { name, .. }
            | RoleAction::Remove { name }
            | RoleAction::SetReserve { name, .. } => name,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EventCalendar {
    pub update_events: BTreeSet<(NaiveDate, String)>,
    /// Kept sorted by date; same-date actions keep their insertion order.
    pub role_actions: Vec<(NaiveDate, RoleAction)>,
}

impl EventCalendar {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_event(&mut self, date: NaiveDate, target: impl Into<String>) {
        self.update_events.insert((date, target.into()));
    }

    pub fn add_action(&mut self, date: NaiveDate, action: RoleAction) {
        let at = self.role_actions.partition_point(|(d, _)| *d <= date);
        self.role_actions.insert(at, (date, action));
    }

    /// Distinct dates that carry at least one update event.
    pub fn event_dates(&self) -> BTreeSet<NaiveDate> {
        self.update_events.iter().map(|(d, _)| *d).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.update_events.is_empty() && self.role_actions.is_empty()
    }
}

/// Union of update events; role actions ordered by date, `a` before `b` on
/// equal dates.
pub fn merge_calendars(a: &EventCalendar, b: &EventCalendar) -> EventCalendar {
    let mut merged = a.clone();
    merged.update_events.extend(b.update_events.iter().cloned());
    for (date, action) in &b.role_actions {
        merged.add_action(*date, action.clone());
    }
    merged
}

pub fn parse_date(text: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(text, DATE_FORMAT)
        .map_err(|e| Error::Parameter(format!("invalid date `{text}`: {e}")))
}

/// Reads update events from a `Date[,Target]` CSV. Rows with no target bind
/// to `default_target`; repeated rows collapse.
pub fn load_event_dates(csv_text: &str, default_target: &str) -> Result<EventCalendar> {
    let table = Table::parse(csv_text)?;
    let date_col = table.column("Date")?;
    let target_col = table.optional_column("Target");
    let mut calendar = EventCalendar::new();
    for row in table.rows() {
        let date = parse_row_date(&row, row.get(date_col))?;
        let target = target_col
            .map(|c| row.get(c))
            .filter(|t| !t.is_empty())
            .unwrap_or(default_target);
        calendar.add_event(date, target);
    }
    Ok(calendar)
}

/// Reads scripted role changes from a `Date,Action,Name,RoleType,Algorithm,Flag`
/// CSV. `Action` is one of `add`, `remove` or `reserve`.
pub fn load_role_actions(csv_text: &str) -> Result<EventCalendar> {
    let table = Table::parse(csv_text)?;
    let date_col = table.column("Date")?;
    let action_col = table.column("Action")?;
    let name_col = table.column("Name")?;
    let type_col = table.optional_column("RoleType");
    let alg_col = table.optional_column("Algorithm");
    let flag_col = table.optional_column("Flag");

    let mut calendar = EventCalendar::new();
    for row in table.rows() {
        let date = parse_row_date(&row, row.get(date_col))?;
        let name = row.get(name_col);
        if name.is_empty() {
            return Err(row.error("`Name` is empty"));
        }
        let name = name.to_string();
        let action = match row.get(action_col).to_ascii_lowercase().as_str() {
            "add" => {
                let role_type = type_col
                    .map(|c| row.get(c))
                    .filter(|t| !t.is_empty())
                    .ok_or_else(|| row.error("`add` requires `RoleType`"))?
                    .parse::<RoleType>()
                    .map_err(|e| row.error(e.to_string()))?;
                let algorithm = alg_col
                    .map(|c| row.get(c))
                    .filter(|a| !a.is_empty())
                    .map(str::to_string);
                RoleAction::Add {
                    name,
                    role_type,
                    algorithm,
                }
            }
            "remove" => RoleAction::Remove { name },
            "reserve" => {
                let flag = flag_col
                    .map(|c| row.get(c))
                    .ok_or_else(|| row.error("`reserve` requires `Flag`"))
                    .and_then(|f| {
                        parse_bool(f).ok_or_else(|| row.error(format!("invalid flag `{f}`")))
                    })?;
                RoleAction::SetReserve { name, flag }
            }
            other => return Err(row.error(format!("unknown action `{other}`"))),
        };
        calendar.add_action(date, action);
    }
    Ok(calendar)
}

pub(crate) fn parse_bool(text: &str) -> Option<bool> {
    match text.to_ascii_lowercase().as_str() {
        "true" => Some(true),
        "false" => Some(false),
        _ => None,
    }
}

fn parse_row_date(row: &crate::table::Row<'_>, text: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(text, DATE_FORMAT)
        .map_err(|e| row.error(format!("invalid date `{text}`: {e}")))
}

/// Seeded Poisson arrivals at date granularity.
///
/// Each date in `[start, end]` gets an independent uniform variate: a
/// ChaCha8 generator seeded with `ChaCha8Rng::seed_from_u64(seed)`, switched
/// to stream `n` for the `n`-th date (0-based), yields one `u64` whose top 53
/// bits become `u` in `[0, 1)`. The arrival count is the inverse-transform
/// Poisson draw for `u` with mean `rate_per_day`; the date carries an event
/// when that count is at least one.
pub fn generate_poisson_events(
    rate_per_day: f64,
    start: NaiveDate,
    end: NaiveDate,
    seed: u64,
    target: &str,
) -> Result<EventCalendar> {
    if !rate_per_day.is_finite() || rate_per_day < 0.0 {
        return Err(Error::Parameter(format!(
            "Poisson rate must be a finite, non-negative number (got {rate_per_day})"
        )));
    }
    let dates = date_range(start, end, 1)?;
    let mut calendar = EventCalendar::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (index, date) in dates.into_iter().enumerate() {
        rng.set_stream(index as u64);
        rng.set_word_pos(0);
        let u = unit_interval(rng.next_u64());
        if poisson_inverse_transform(u, rate_per_day) >= 1 {
            calendar.add_event(date, target);
        }
    }
    Ok(calendar)
}

fn unit_interval(word: u64) -> f64 {
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Smallest `k` with `P(X <= k) > u` for `X ~ Poisson(mean)`. Probabilities
/// are evaluated in log space so large means do not underflow.
pub fn poisson_inverse_transform(u: f64, mean: f64) -> u64 {
    if mean == 0.0 {
        return 0;
    }
    let ln_mean = mean.ln();
    let mut ln_pmf = -mean;
    let mut cdf = ln_pmf.exp();
    let mut k = 0u64;
    // Past mean + 40 sd (and at least 40 steps) the remaining tail is
    // negligible relative to f64 resolution.
    let limit = (mean + 40.0 * mean.sqrt() + 40.0).ceil() as u64;
    while u >= cdf && k < limit {
        k += 1;
        ln_pmf += ln_mean - (k as f64).ln();
        cdf += ln_pmf.exp();
    }
    k
}
