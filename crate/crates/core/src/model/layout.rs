use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A grid coordinate `[row, col]`. Parking sites may have negative coordinates.
pub type Site = [i32; 2];

/// Inclusive rectangle of grid sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Rect {
    pub rows: [i32; 2],
    pub cols: [i32; 2],
}

impl Rect {
    pub fn contains(&self, site: Site) -> bool {
        (self.rows[0]..=self.rows[1]).contains(&site[0]) && (self.cols[0]..=self.cols[1]).contains(&site[1])
    }

    pub fn is_empty(&self) -> bool {
        self.rows[0] > self.rows[1] || self.cols[0] > self.cols[1]
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        !(self.rows[1] < other.rows[0]
            || other.rows[1] < self.rows[0]
            || self.cols[1] < other.cols[0]
            || other.cols[1] < self.cols[0])
    }

    pub fn bounding(sites: impl IntoIterator<Item = Site>) -> Option<Rect> {
        sites.into_iter().fold(None, |acc, [r, c]| {
            Some(match acc {
                None => Rect {
                    rows: [r, r],
                    cols: [c, c],
                },
                Some(b) => Rect {
                    rows: [b.rows[0].min(r), b.rows[1].max(r)],
                    cols: [b.cols[0].min(c), b.cols[1].max(c)],
                },
            })
        })
    }
}

/// A stabilizer check measured by one ancilla. `offsets` are the positions of
/// its data qubits relative to `home`, in gate order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub ancilla: u32,
    pub home: Site,
    pub offsets: Vec<Site>,
}

/// Placement of a GB-code block on a neutral-atom trap grid.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridLayout {
    /// `[rows, cols]` of the block.
    pub grid: [u32; 2],
    pub data: Vec<Site>,
    #[serde(default)]
    pub x_checks: Vec<Check>,
    #[serde(default)]
    pub z_checks: Vec<Check>,
    /// Candidate regions where ancilla groups wait and are measured.
    pub parking: Vec<Rect>,
}

impl GridLayout {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let parse_err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            message,
        };
        let layout: GridLayout = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| parse_err(e.to_string()))?
        } else {
            toml::from_str(&text).map_err(|e| parse_err(e.to_string()))?
        };
        layout.validate()?;
        Ok(layout)
    }

    pub fn in_grid(&self, [r, c]: Site) -> bool {
        r >= 0 && c >= 0 && (r as u32) < self.grid[0] && (c as u32) < self.grid[1]
    }

    /// Bounding box of the data qubits and ancilla home positions.
    pub fn data_region(&self) -> Option<Rect> {
        let homes = self.x_checks.iter().chain(&self.z_checks).map(|c| c.home);
        Rect::bounding(self.data.iter().copied().chain(homes))
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::validation(msg));
        let data: HashSet<Site> = self.data.iter().copied().collect();
        if data.len() != self.data.len() {
            return fail("duplicate data position".into());
        }
        if let Some(site) = self.data.iter().find(|s| !self.in_grid(**s)) {
            return fail(format!("data position {site:?} lies outside the {:?} grid", self.grid));
        }

        let mut ancillas = HashSet::new();
        let mut homes = HashSet::new();
        for (group, checks) in [("x", &self.x_checks), ("z", &self.z_checks)] {
            let weight = checks.first().map(|c| c.offsets.len());
            for check in checks {
                if !ancillas.insert(check.ancilla) {
                    return fail(format!("ancilla id {} used twice", check.ancilla));
                }
                if !self.in_grid(check.home) || data.contains(&check.home) || !homes.insert(check.home) {
                    return fail(format!(
                        "ancilla {} home {:?} must be a free in-grid site",
                        check.ancilla, check.home
                    ));
                }
                if Some(check.offsets.len()) != weight {
                    return fail(format!("{group} checks must all have the same weight"));
                }
                for off in &check.offsets {
                    let target = [check.home[0] + off[0], check.home[1] + off[1]];
                    if !data.contains(&target) {
                        return fail(format!(
                            "ancilla {} offset {:?} lands on {:?}, which is not a data position",
                            check.ancilla, off, target
                        ));
                    }
                }
            }
        }

        let region = self.data_region();
        for rect in &self.parking {
            if rect.is_empty() {
                return fail(format!("parking region {rect:?} is empty"));
            }
            if region.is_some_and(|r| r.intersects(rect)) {
                return fail(format!("parking region {rect:?} overlaps the data region"));
            }
        }
        Ok(())
    }
}
