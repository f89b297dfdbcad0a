//! The repository state machine and its accounting ledger.
//!
//! A [`Repository`] holds an ordered list of role instances. Every call to
//! [`Repository::publish_timestamp`] is one timestamp publication as seen by a
//! client that downloads and verifies every signed file:
//!
//! 1. Roles whose key must be (re)published, or whose key is exhausted and
//!    needed, are rolled over. If anything rolled, or the role set changed, a
//!    new root file is published: the public key of every role is downloaded
//!    and every Root instance signs once.
//! 2. Every pending, non-reserve Target signs and stops being pending.
//! 3. If any Target signed, every non-reserve Snapshot signs.
//! 4. Every non-reserve Timestamp signs.
//!
//! Pending flags on Root, Snapshot and Timestamp roles are never cleared, so
//! an exhausted key on those roles rolls over at the next publication that
//! reaches the rollover check.

use std::fmt;
use std::str::FromStr;

use crate::algorithm::SignatureAlgorithm;
use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RoleType {
    Root,
    Timestamp,
    Snapshot,
    Target,
}

impl RoleType {
    pub const ALL: [RoleType; 4] = [
        RoleType::Root,
        RoleType::Timestamp,
        RoleType::Snapshot,
        RoleType::Target,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RoleType::Root => "Root",
            RoleType::Timestamp => "Timestamp",
            RoleType::Snapshot => "Snapshot",
            RoleType::Target => "Target",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for RoleType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RoleType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RoleType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::UnknownRoleType(s.to_string()))
    }
}

/// One role instance and its signing state.
#[derive(Debug, Clone, PartialEq)]
pub struct RoleState {
    pub name: String,
    pub role_type: RoleType,
    pub algorithm: SignatureAlgorithm,
    /// Signatures issued by the current key.
    pub num_sigs: u64,
    /// Signatures issued by this instance across all of its keys.
    pub lifetime_sigs: u64,
    pub reserve: bool,
    pub pending: bool,
    /// The key must appear in the next root file.
    pub rollover: bool,
}

impl RoleState {
    pub fn new(
        name: impl Into<String>,
        role_type: RoleType,
        algorithm: SignatureAlgorithm,
    ) -> Self {
        Self {
            name: name.into(),
            role_type,
            algorithm,
            num_sigs: 0,
            lifetime_sigs: 0,
            reserve: false,
            pending: true,
            rollover: true,
        }
    }
}

/// Per-publication deltas.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TickReport {
    /// Signatures issued, indexed in [`RoleType::ALL`] order.
    pub signatures_by_type: [u64; 4],
    pub sig_bytes: u64,
    pub pk_bytes: u64,
    pub cost: f64,
    /// Roles processed by the rollover check in this publication.
    pub rolled_roles: u64,
    pub root_published: bool,
}

impl TickReport {
    pub fn signatures(&self) -> u64 {
        self.signatures_by_type.iter().sum()
    }

    pub fn signatures_of(&self, role_type: RoleType) -> u64 {
        self.signatures_by_type[role_type.index()]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LedgerTotals {
    pub name: String,
    pub sig_bytes: u64,
    pub pk_bytes: u64,
    pub total_bytes: u64,
    pub cost: f64,
    pub signatures: u64,
    pub rollover_events: u64,
    pub root_publications: u64,
}

#[derive(Debug, Clone)]
pub struct Repository {
    name: String,
    roles: Vec<RoleState>,
    accum_sig_size: u64,
    accum_pk_size: u64,
    accum_cost: f64,
    accum_signatures: u64,
    rollover_events: u64,
    root_publications: u64,
    /// Lifetime signatures of roles that have been removed.
    retired_sigs: u64,
    update_root: bool,
}

impl Repository {
    /// An empty repository. The first publication always carries a root file.
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            roles: Vec::new(),
            accum_sig_size: 0,
            accum_pk_size: 0,
            accum_cost: 0.0,
            accum_signatures: 0,
            rollover_events: 0,
            root_publications: 0,
            retired_sigs: 0,
            update_root: true,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn roles(&self) -> &[RoleState] {
        &self.roles
    }

    pub fn update_root(&self) -> bool {
        self.update_root
    }

    pub fn retired_sigs(&self) -> u64 {
        self.retired_sigs
    }

    pub fn count_of(&self, role_type: RoleType) -> usize {
        self.roles
            .iter()
            .filter(|r| r.role_type == role_type)
            .count()
    }

    /// Appends a role and schedules a root update. Existing roles with the
    /// same name and type are flagged for publication as well.
    pub fn add_role(&mut self, name: &str, role_type: RoleType, algorithm: SignatureAlgorithm) {
        self.roles.push(RoleState::new(name, role_type, algorithm));
        self.update_root = true;
        for role in self
            .roles
            .iter_mut()
            .filter(|r| r.name == name && r.role_type == role_type)
        {
            role.rollover = true;
            role.pending = true;
        }
    }

    /// Removes every role named `name`, of any type. Returns how many were
    /// removed.
    pub fn remove_role(&mut self, name: &str) -> usize {
        let before = self.roles.len();
        let mut retired = 0;
        self.roles.retain(|r| {
            let keep = r.name != name;
            if !keep {
                retired += r.lifetime_sigs;
            }
            keep
        });
        self.retired_sigs += retired;
        let removed = before - self.roles.len();
        if removed > 0 {
            self.update_root = true;
        }
        removed
    }

    pub fn set_reserve(&mut self, name: &str, flag: bool) -> usize {
        let mut matched = 0;
        for role in self.roles.iter_mut().filter(|r| r.name == name) {
            role.reserve = flag;
            matched += 1;
        }
        matched
    }

    /// Marks every Target named `target_name` as pending. When at least one
    /// matches, every Snapshot becomes pending too. Returns the match count.
    pub fn stage_update(&mut self, target_name: &str) -> usize {
        let mut matched = 0;
        for role in self
            .roles
            .iter_mut()
            .filter(|r| r.role_type == RoleType::Target && r.name == target_name)
        {
            role.pending = true;
            matched += 1;
        }
        if matched > 0 {
            for role in self
                .roles
                .iter_mut()
                .filter(|r| r.role_type == RoleType::Snapshot)
            {
                role.pending = true;
            }
        }
        matched
    }

    /// Flags for rollover every role that is already flagged, or whose key is
    /// exhausted while a signature is still required of it. Processed roles
    /// start a fresh key. Returns the number processed.
    pub fn rollover_check(&mut self) -> u64 {
        let mut rolled = 0;
        for role in &mut self.roles {
            if role.rollover || (role.num_sigs == role.algorithm.max_sigs && role.pending) {
                role.rollover = true;
                role.num_sigs = 0;
                rolled += 1;
            }
        }
        self.rollover_events += rolled;
        rolled
    }

    pub fn publish_timestamp(&mut self) -> TickReport {
        let mut report = TickReport::default();

        let rolled = self.rollover_check();
        report.rolled_roles = rolled;
        if rolled > 0 || self.update_root {
            for i in 0..self.roles.len() {
                report.pk_bytes += self.roles[i].algorithm.pk_size;
                if self.roles[i].role_type == RoleType::Root {
                    self.sign(i, &mut report);
                }
                self.roles[i].rollover = false;
            }
            self.update_root = false;
            self.root_publications += 1;
            report.root_published = true;
        }

        let mut updates = 0;
        for i in 0..self.roles.len() {
            let role = &self.roles[i];
            if role.role_type == RoleType::Target && role.pending && !role.reserve {
                self.sign(i, &mut report);
                self.roles[i].pending = false;
                updates += 1;
            }
        }

        if updates > 0 {
            for i in 0..self.roles.len() {
                let role = &self.roles[i];
                if role.role_type == RoleType::Snapshot && !role.reserve {
                    self.sign(i, &mut report);
                }
            }
        }

        for i in 0..self.roles.len() {
            let role = &self.roles[i];
            if role.role_type == RoleType::Timestamp && !role.reserve {
                self.sign(i, &mut report);
            }
        }

        self.accum_pk_size += report.pk_bytes;
        report
    }

    fn sign(&mut self, index: usize, report: &mut TickReport) {
        let role = &mut self.roles[index];
        role.num_sigs += 1;
        role.lifetime_sigs += 1;
        self.accum_sig_size += role.algorithm.sig_size;
        self.accum_cost += role.algorithm.cost;
        self.accum_signatures += 1;
        report.signatures_by_type[role.role_type.index()] += 1;
        report.sig_bytes += role.algorithm.sig_size;
        report.cost += role.algorithm.cost;
    }

    pub fn ledger_totals(&self) -> LedgerTotals {
        LedgerTotals {
            name: self.name.clone(),
            sig_bytes: self.accum_sig_size,
            pk_bytes: self.accum_pk_size,
            total_bytes: self.accum_sig_size + self.accum_pk_size,
            cost: self.accum_cost,
            signatures: self.accum_signatures,
            rollover_events: self.rollover_events,
            root_publications: self.root_publications,
        }
    }
}
