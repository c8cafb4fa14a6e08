//! JSON report types shared by the verify and chart commands.

use serde::Serialize;

#[derive(Serialize)]
pub struct Case {
    pub name: String,
    pub status: Status,
    /// Worst residual observed across the trials.
    pub residual: f64,
    pub tolerance: f64,
}

#[derive(Serialize, Clone, Copy, PartialEq)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Serialize)]
pub struct Dims {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub r: usize,
}

#[derive(Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub dims: Dims,
    pub seed: u64,
    pub trials: u64,
    pub cases: Vec<Case>,
    pub status: Status,
    pub wall_time_ms: f64,
}

#[derive(Serialize)]
pub struct Report {
    pub suites: Vec<SuiteReport>,
    pub status: Status,
    pub wall_time_ms: f64,
}

impl SuiteReport {
    pub fn assemble(
        suite: &str,
        dims: Dims,
        seed: u64,
        trials: u64,
        cases: Vec<Case>,
        wall_time_ms: f64,
    ) -> Self {
        let status = if cases.iter().all(|c| c.status == Status::Pass) {
            Status::Pass
        } else {
            Status::Fail
        };
        SuiteReport {
            suite: suite.to_string(),
            dims,
            seed,
            trials,
            cases,
            status,
            wall_time_ms,
        }
    }
}

impl Report {
    pub fn assemble(suites: Vec<SuiteReport>, wall_time_ms: f64) -> Self {
        let status = if suites.iter().all(|s| s.status == Status::Pass) {
            Status::Pass
        } else {
            Status::Fail
        };
        Report {
            suites,
            status,
            wall_time_ms,
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Accumulates the worst residual per named check across trials.
pub struct CaseTracker {
    name: String,
    worst: f64,
    tolerance: f64,
}

impl CaseTracker {
    pub fn new(name: &str, tolerance: f64) -> Self {
        CaseTracker {
            name: name.to_string(),
            worst: 0.0,
            tolerance,
        }
    }

    pub fn observe(&mut self, residual: f64) {
        if residual > self.worst {
            self.worst = residual;
        }
    }

    /// Records a hard boolean check as residual 0 or 1 against bound 0.5.
    pub fn observe_flag(&mut self, ok: bool) {
        self.observe(if ok { 0.0 } else { 1.0 });
    }

    pub fn into_case(self) -> Case {
        let status = if self.worst <= self.tolerance {
            Status::Pass
        } else {
            Status::Fail
        };
        Case {
            name: self.name,
            status,
            residual: self.worst,
            tolerance: self.tolerance,
        }
    }
}
