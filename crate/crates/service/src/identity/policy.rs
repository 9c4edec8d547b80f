// Copyright 2026 The qgate Authors
// SPDX-License-Identifier: Apache-2.0

//! Role- and group-based permission rules.
//!
//! A request is allowed when some rule matches one of the caller's roles,
//! the caller's group (if the rule names one), and lists the action.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::model::{Group, Role};
use super::token::Claims;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    SubmitJob,
    ReadOwnJobs,
    ReadAllJobs,
    ReadMonitor,
    ManageUsers,
}

impl Action {
    pub const ALL: [Action; 5] = [
        Action::SubmitJob,
        Action::ReadOwnJobs,
        Action::ReadAllJobs,
        Action::ReadMonitor,
        Action::ManageUsers,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Action::SubmitJob => "submit_job",
            Action::ReadOwnJobs => "read_own_jobs",
            Action::ReadAllJobs => "read_all_jobs",
            Action::ReadMonitor => "read_monitor",
            Action::ManageUsers => "manage_users",
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown action `{0}`")]
pub struct UnknownAction(pub String);

impl FromStr for Action {
    type Err = UnknownAction;
    fn from_str(s: &str) -> Result<Self, UnknownAction> {
        Action::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| UnknownAction(s.to_owned()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyRule {
    pub role: Role,
    /// Restricts the rule to one group; absent matches both.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<Group>,
    pub actions: Vec<Action>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Policy {
    rules: Vec<PolicyRule>,
}

impl Default for Policy {
    /// user: submit and read own jobs; admin: everything; internal users may
    /// also read the monitor.
    fn default() -> Self {
        Policy {
            rules: vec![
                PolicyRule {
                    role: Role::User,
                    group: None,
                    actions: vec![Action::SubmitJob, Action::ReadOwnJobs],
                },
                PolicyRule {
                    role: Role::Admin,
                    group: None,
                    actions: Action::ALL.to_vec(),
                },
                PolicyRule {
                    role: Role::User,
                    group: Some(Group::Internal),
                    actions: vec![Action::ReadMonitor],
                },
            ],
        }
    }
}

impl Policy {
    pub fn new(rules: Vec<PolicyRule>) -> Policy {
        Policy { rules }
    }

    pub fn rules(&self) -> &[PolicyRule] {
        &self.rules
    }

    pub fn allows(&self, group: Option<Group>, roles: &[Role], action: Action) -> bool {
        self.rules.iter().any(|r| {
            roles.contains(&r.role)
                && r.group.is_none_or(|g| Some(g) == group)
                && r.actions.contains(&action)
        })
    }

    pub fn check(&self, claims: &Claims, action: Action) -> bool {
        self.allows(claims.group(), &claims.roles, action)
    }

    /// String-keyed check for callers holding an action name.
    pub fn check_named(&self, claims: &Claims, action: &str) -> Result<bool, UnknownAction> {
        Ok(self.check(claims, action.parse()?))
    }
}
