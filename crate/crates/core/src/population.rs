//! Three-level population structures.
//!
//! Every individual belongs to exactly one household and exactly one group.
//! Group `0` is the dummy group for individuals without a school, workplace or
//! village; its contact rate is pinned to zero. Groups that share a contact
//! rate share a *rate class*. Classes are numbered `1..=K`, and class `0` is
//! reserved for the dummy group.
//!
//! Internally individuals are dense indices `0..N`, households are dense
//! indices `0..n`, and groups are `0..=J`. The JSON file format uses 1-based
//! household numbers and arbitrary integer individual labels.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const KIND_NONE: &str = "none";
pub const KIND_VILLAGE: &str = "village";
pub const KIND_SCHOOL: &str = "school";
pub const KIND_WORKPLACE: &str = "workplace";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupInfo {
    pub kind: String,
    pub rate_class: usize,
}

/// Immutable after construction; share it freely across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PopulationStructure {
    labels: Vec<i64>,
    household_of: Vec<usize>,
    group_of: Vec<usize>,
    groups: Vec<GroupInfo>,
    household_members: Vec<Vec<usize>>,
    group_members: Vec<Vec<usize>>,
}

impl PopulationStructure {
    /// Builds a structure from per-individual memberships.
    ///
    /// `groups[0]` must describe the dummy group (rate class 0). Households
    /// must be dense `0..n` and every non-dummy group must have members.
    pub fn new(
        labels: Vec<i64>,
        household_of: Vec<usize>,
        group_of: Vec<usize>,
        groups: Vec<GroupInfo>,
    ) -> Result<Self> {
        let n_ind = household_of.len();
        if n_ind == 0 {
            return Err(Error::population("population has no individuals"));
        }
        if labels.len() != n_ind || group_of.len() != n_ind {
            return Err(Error::population("membership vectors differ in length"));
        }
        if groups.is_empty() {
            return Err(Error::population("group table must contain the dummy group 0"));
        }
        if groups[0].rate_class != 0 {
            return Err(Error::population(format!(
                "group 0 must use rate class 0, found {}",
                groups[0].rate_class
            )));
        }
        for (g, info) in groups.iter().enumerate().skip(1) {
            if info.rate_class == 0 {
                return Err(Error::population(format!(
                    "group {g} uses rate class 0, which is reserved for the dummy group"
                )));
            }
        }

        let n_households = household_of.iter().max().map_or(0, |&h| h + 1);
        let mut household_members = vec![Vec::new(); n_households];
        let mut group_members = vec![Vec::new(); groups.len()];
        for i in 0..n_ind {
            household_members[household_of[i]].push(i);
            let g = group_of[i];
            if g >= groups.len() {
                return Err(Error::population(format!(
                    "individual {} refers to unknown group {g}",
                    labels[i]
                )));
            }
            group_members[g].push(i);
        }
        if let Some(h) = household_members.iter().position(Vec::is_empty) {
            return Err(Error::population(format!("household {} has no members", h + 1)));
        }
        if let Some(g) = group_members.iter().skip(1).position(Vec::is_empty) {
            return Err(Error::population(format!("group {} has no members", g + 1)));
        }
        let mut seen = HashMap::with_capacity(n_ind);
        for &l in &labels {
            if seen.insert(l, ()).is_some() {
                return Err(Error::population(format!("duplicate individual id {l}")));
            }
        }

        Ok(Self {
            labels,
            household_of,
            group_of,
            groups,
            household_members,
            group_members,
        })
    }

    pub fn n_individuals(&self) -> usize {
        self.household_of.len()
    }

    pub fn n_households(&self) -> usize {
        self.household_members.len()
    }

    /// Number of real groups `J` (the dummy group is not counted).
    pub fn n_groups(&self) -> usize {
        self.groups.len() - 1
    }

    /// Number of non-dummy rate classes `K`.
    pub fn n_rate_classes(&self) -> usize {
        self.groups.iter().map(|g| g.rate_class).max().unwrap_or(0)
    }

    pub fn label(&self, i: usize) -> i64 {
        self.labels[i]
    }

    pub fn index_of_label(&self, label: i64) -> Option<usize> {
        // Builders use labels 0..N, so try the direct slot first.
        if label >= 0 && (label as usize) < self.labels.len() && self.labels[label as usize] == label {
            return Some(label as usize);
        }
        self.labels.iter().position(|&l| l == label)
    }

    pub fn household_of(&self, i: usize) -> usize {
        self.household_of[i]
    }

    pub fn group_of(&self, i: usize) -> usize {
        self.group_of[i]
    }

    pub fn household_members(&self, h: usize) -> &[usize] {
        &self.household_members[h]
    }

    pub fn group_members(&self, g: usize) -> &[usize] {
        &self.group_members[g]
    }

    pub fn household_size(&self, h: usize) -> usize {
        self.household_members[h].len()
    }

    pub fn group_size(&self, g: usize) -> usize {
        self.group_members[g].len()
    }

    pub fn group_kind(&self, g: usize) -> &str {
        &self.groups[g].kind
    }

    pub fn rate_class(&self, g: usize) -> usize {
        self.groups[g].rate_class
    }

    pub fn groups(&self) -> &[GroupInfo] {
        &self.groups
    }

    pub fn to_file(&self) -> PopulationFile {
        PopulationFile {
            individuals: (0..self.n_individuals())
                .map(|i| IndividualRecord {
                    id: self.labels[i],
                    household: self.household_of[i] as i64 + 1,
                    group: Some(self.group_of[i]),
                })
                .collect(),
            groups: self
                .groups
                .iter()
                .enumerate()
                .skip(1)
                .map(|(id, g)| GroupRecord {
                    id,
                    kind: g.kind.clone(),
                    rate_class: g.rate_class,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: PopulationFile = serde_json::from_str(text)?;
        file.into_structure()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndividualRecord {
    pub id: i64,
    pub household: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupRecord {
    pub id: usize,
    pub kind: String,
    pub rate_class: usize,
}

/// On-disk JSON layout of a population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationFile {
    pub individuals: Vec<IndividualRecord>,
    #[serde(default)]
    pub groups: Vec<GroupRecord>,
}

impl PopulationFile {
    pub fn into_structure(self) -> Result<PopulationStructure> {
        let mut groups: BTreeMap<usize, GroupInfo> = BTreeMap::new();
        for g in &self.groups {
            let info = GroupInfo {
                kind: g.kind.clone(),
                rate_class: g.rate_class,
            };
            if groups.insert(g.id, info).is_some() {
                return Err(Error::population(format!("group {} declared twice", g.id)));
            }
        }
        match groups.get(&0) {
            Some(g0) if g0.rate_class != 0 => {
                return Err(Error::population(format!(
                    "group 0 must use rate class 0, found {}",
                    g0.rate_class
                )))
            }
            Some(_) => {}
            None => {
                groups.insert(
                    0,
                    GroupInfo {
                        kind: KIND_NONE.to_string(),
                        rate_class: 0,
                    },
                );
            }
        }
        let max_group = *groups.keys().next_back().unwrap_or(&0);
        if groups.len() != max_group + 1 {
            return Err(Error::population("group ids must be contiguous 1..J"));
        }
        let group_table: Vec<GroupInfo> = groups.into_values().collect();

        let mut household_labels: Vec<i64> = self.individuals.iter().map(|r| r.household).collect();
        household_labels.sort_unstable();
        household_labels.dedup();
        if household_labels.first().is_some_and(|&h| h < 1) {
            return Err(Error::population("household ids must be positive"));
        }
        let household_index: HashMap<i64, usize> = household_labels.iter().enumerate().map(|(i, &h)| (h, i)).collect();

        let mut by_id: HashMap<i64, i64> = HashMap::new();
        let mut labels = Vec::with_capacity(self.individuals.len());
        let mut household_of = Vec::with_capacity(self.individuals.len());
        let mut group_of = Vec::with_capacity(self.individuals.len());
        for rec in &self.individuals {
            if let Some(&prev) = by_id.get(&rec.id) {
                return Err(if prev != rec.household {
                    Error::population(format!(
                        "individual {} is listed in households {prev} and {}",
                        rec.id, rec.household
                    ))
                } else {
                    Error::population(format!("duplicate individual id {}", rec.id))
                });
            }
            by_id.insert(rec.id, rec.household);
            let g = rec.group.unwrap_or(0);
            if g >= group_table.len() {
                return Err(Error::population(format!(
                    "individual {} refers to unknown group {g}",
                    rec.id
                )));
            }
            labels.push(rec.id);
            household_of.push(household_index[&rec.household]);
            group_of.push(g);
        }
        PopulationStructure::new(labels, household_of, group_of, group_table)
    }
}

/// `m` equal villages of `households_per_village` households of
/// `household_size`; all villages share rate class 1.
pub fn build_villages(m: usize, households_per_village: usize, household_size: usize) -> Result<PopulationStructure> {
    if m == 0 || households_per_village == 0 || household_size == 0 {
        return Err(Error::arg(
            "village count, households per village and household size must be positive",
        ));
    }
    let n_ind = m * households_per_village * household_size;
    let mut household_of = Vec::with_capacity(n_ind);
    let mut group_of = Vec::with_capacity(n_ind);
    for v in 0..m {
        for k in 0..households_per_village {
            let h = v * households_per_village + k;
            for _ in 0..household_size {
                household_of.push(h);
                group_of.push(v + 1);
            }
        }
    }
    let mut groups = vec![GroupInfo {
        kind: KIND_NONE.into(),
        rate_class: 0,
    }];
    groups.extend((0..m).map(|_| GroupInfo {
        kind: KIND_VILLAGE.into(),
        rate_class: 1,
    }));
    PopulationStructure::new((0..n_ind as i64).collect(), household_of, group_of, groups)
}

pub const SW_HOUSEHOLDS: usize = 500;
pub const SW_SCHOOLS: usize = 10;
pub const SW_WORKPLACES: usize = 40;

/// The schools/workplaces layout: 500 households of two children and two
/// adults, 10 schools of 100 (rate class 1) and 40 workplaces of 25 (rate
/// class 2).
///
/// Household `h` (1-based) sends its children to school `ceil(h / 50)`, its
/// female adult to workplace `k = ceil(h / 25)` and its male adult to
/// workplace `20 + k`. Within a household the members are ordered
/// child, child, female, male.
pub fn build_schools_workplaces() -> PopulationStructure {
    let n_ind = SW_HOUSEHOLDS * 4;
    let mut household_of = Vec::with_capacity(n_ind);
    let mut group_of = Vec::with_capacity(n_ind);
    for h0 in 0..SW_HOUSEHOLDS {
        let school = h0 / 50 + 1;
        let k = h0 / 25 + 1;
        for g in [school, school, SW_SCHOOLS + k, SW_SCHOOLS + 20 + k] {
            household_of.push(h0);
            group_of.push(g);
        }
    }
    let mut groups = vec![GroupInfo {
        kind: KIND_NONE.into(),
        rate_class: 0,
    }];
    groups.extend((0..SW_SCHOOLS).map(|_| GroupInfo {
        kind: KIND_SCHOOL.into(),
        rate_class: 1,
    }));
    groups.extend((0..SW_WORKPLACES).map(|_| GroupInfo {
        kind: KIND_WORKPLACE.into(),
        rate_class: 2,
    }));
    PopulationStructure::new((0..n_ind as i64).collect(), household_of, group_of, groups)
        .expect("fixed layout is valid")
}

/// Roles inside a household of the schools/workplaces layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoleHousehold {
    pub children: [usize; 2],
    pub female: usize,
    pub male: usize,
    pub school: usize,
    pub female_workplace: usize,
    pub male_workplace: usize,
}

/// Household roles for a population in which every household has two
/// children in the same rate-class-1 group (school) and two adults in
/// distinct rate-class-2 groups (workplaces). Gender is only a label: the
/// adult in the lower-numbered workplace is called the female.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example2Layout {
    pub households: Vec<RoleHousehold>,
    pub schools: Vec<usize>,
    pub workplaces: Vec<usize>,
}

impl Example2Layout {
    pub fn from_population(pop: &PopulationStructure) -> Result<Self> {
        let mut households = Vec::with_capacity(pop.n_households());
        for h in 0..pop.n_households() {
            let members = pop.household_members(h);
            let (kids, adults): (Vec<usize>, Vec<usize>) =
                members.iter().partition(|&&i| pop.rate_class(pop.group_of(i)) == 1);
            let bad = || {
                Error::population(format!(
                    "household {} does not have two children in one class-1 group and two adults in distinct class-2 groups",
                    h + 1
                ))
            };
            if kids.len() != 2 || adults.len() != 2 {
                return Err(bad());
            }
            if adults.iter().any(|&a| pop.rate_class(pop.group_of(a)) != 2) {
                return Err(bad());
            }
            let school = pop.group_of(kids[0]);
            if pop.group_of(kids[1]) != school {
                return Err(bad());
            }
            let (mut f, mut m) = (adults[0], adults[1]);
            if pop.group_of(f) > pop.group_of(m) {
                std::mem::swap(&mut f, &mut m);
            }
            if pop.group_of(f) == pop.group_of(m) {
                return Err(bad());
            }
            households.push(RoleHousehold {
                children: [kids[0], kids[1]],
                female: f,
                male: m,
                school,
                female_workplace: pop.group_of(f),
                male_workplace: pop.group_of(m),
            });
        }
        let schools = (1..=pop.n_groups()).filter(|&g| pop.rate_class(g) == 1).collect();
        let workplaces = (1..=pop.n_groups()).filter(|&g| pop.rate_class(g) == 2).collect();
        Ok(Self {
            households,
            schools,
            workplaces,
        })
    }
}

/// Individuals seeded at time zero.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct InitialCondition {
    #[serde(default)]
    pub initially_exposed: Vec<usize>,
    #[serde(default)]
    pub initially_infective: Vec<usize>,
}

impl InitialCondition {
    pub fn single_infective(i: usize) -> Self {
        Self {
            initially_exposed: vec![],
            initially_infective: vec![i],
        }
    }

    pub fn validate(&self, pop: &PopulationStructure) -> Result<()> {
        if self.initially_exposed.is_empty() && self.initially_infective.is_empty() {
            return Err(Error::arg("initial condition has no cases"));
        }
        let mut seen = vec![false; pop.n_individuals()];
        for &i in self.initially_exposed.iter().chain(&self.initially_infective) {
            if i >= pop.n_individuals() {
                return Err(Error::arg(format!("initial case {i} is not in the population")));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::arg(format!("initial case {i} listed twice")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn villages_shape() {
        let p = build_villages(4, 500, 2).unwrap();
        assert_eq!(p.n_individuals(), 4000);
        assert_eq!(p.n_households(), 2000);
        assert_eq!(p.n_groups(), 4);
        for g in 1..=4 {
            assert_eq!(p.group_size(g), 1000);
            assert_eq!(p.rate_class(g), 1);
            assert_eq!(p.group_kind(g), KIND_VILLAGE);
        }
        assert_eq!(p.n_rate_classes(), 1);
        for h in 0..p.n_households() {
            let m = p.household_members(h);
            assert!(m.iter().all(|&i| p.group_of(i) == p.group_of(m[0])));
        }
    }

    #[test]
    fn villages_small_cases() {
        let p = build_villages(1, 1, 1).unwrap();
        assert_eq!((p.n_individuals(), p.n_households(), p.n_groups()), (1, 1, 1));
        assert_eq!(p.group_size(1), 1);

        let p = build_villages(2, 3, 2).unwrap();
        assert_eq!((p.n_individuals(), p.n_households()), (12, 6));
        assert_eq!((p.group_size(1), p.group_size(2)), (6, 6));

        assert!(build_villages(0, 3, 2).is_err());
        assert!(build_villages(2, 0, 2).is_err());
        assert!(build_villages(2, 3, 0).is_err());
    }

    #[test]
    fn schools_workplaces_allocation() {
        let p = build_schools_workplaces();
        assert_eq!((p.n_individuals(), p.n_households()), (2000, 500));
        for s in 1..=10 {
            assert_eq!(p.group_size(s), 100);
            assert_eq!(p.rate_class(s), 1);
        }
        for w in 11..=50 {
            assert_eq!(p.group_size(w), 25);
            assert_eq!(p.rate_class(w), 2);
        }
        let groups = |h: usize| -> Vec<usize> { p.household_members(h).iter().map(|&i| p.group_of(i)).collect() };
        // household 1: school 1, workplaces 1 and 21 (group ids offset by 10 schools)
        assert_eq!(groups(0), vec![1, 1, 11, 31]);
        // household 500: school 10, workplaces 20 and 40
        assert_eq!(groups(499), vec![10, 10, 30, 50]);
        for h in 0..500 {
            let g = groups(h);
            assert_eq!(g[0], g[1]);
            assert_ne!(g[2], g[3]);
        }
    }

    #[test]
    fn example2_roles() {
        let p = build_schools_workplaces();
        let l = Example2Layout::from_population(&p).unwrap();
        assert_eq!(l.households.len(), 500);
        assert_eq!(l.schools.len(), 10);
        assert_eq!(l.workplaces.len(), 40);
        let h = l.households[0];
        assert_eq!((h.school, h.female_workplace, h.male_workplace), (1, 11, 31));
        assert_eq!((h.children, h.female, h.male), ([0, 1], 2, 3));
        assert!(Example2Layout::from_population(&build_villages(2, 3, 4).unwrap()).is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = build_villages(2, 1, 2).unwrap();
        let back = PopulationStructure::from_json(&p.to_json().unwrap()).unwrap();
        assert_eq!(p, back);
        let sw = build_schools_workplaces();
        assert_eq!(sw, PopulationStructure::from_json(&sw.to_json().unwrap()).unwrap());
    }

    #[test]
    fn individual_in_two_households_rejected() {
        let doc = r#"{"individuals":[{"id":1,"household":1,"group":1},{"id":1,"household":2,"group":1}],
                      "groups":[{"id":1,"kind":"village","rate_class":1}]}"#;
        let err = PopulationStructure::from_json(doc).unwrap_err().to_string();
        assert!(err.contains("households"), "{err}");
    }

    #[test]
    fn missing_group_means_dummy() {
        let doc = r#"{"individuals":[{"id":10,"household":1},{"id":11,"household":1,"group":1}],
                      "groups":[{"id":1,"kind":"village","rate_class":1}]}"#;
        let p = PopulationStructure::from_json(doc).unwrap();
        assert_eq!(p.group_of(0), 0);
        assert_eq!(p.group_of(1), 1);
        assert_eq!(p.index_of_label(11), Some(1));
    }

    #[test]
    fn validation_errors() {
        let unknown_group = r#"{"individuals":[{"id":0,"household":1,"group":3}],"groups":[]}"#;
        assert!(PopulationStructure::from_json(unknown_group).is_err());
        let bad_zero = r#"{"individuals":[{"id":0,"household":1}],
                           "groups":[{"id":0,"kind":"none","rate_class":2}]}"#;
        assert!(PopulationStructure::from_json(bad_zero).is_err());
        let dup = r#"{"individuals":[{"id":0,"household":1},{"id":0,"household":1}]}"#;
        assert!(PopulationStructure::from_json(dup).is_err());
        assert!(PopulationStructure::from_json("{not json").is_err());
    }

    #[test]
    fn initial_condition_checks() {
        let p = build_villages(1, 2, 2).unwrap();
        assert!(InitialCondition::default().validate(&p).is_err());
        assert!(InitialCondition::single_infective(9).validate(&p).is_err());
        let both = InitialCondition {
            initially_exposed: vec![1],
            initially_infective: vec![1],
        };
        assert!(both.validate(&p).is_err());
        assert!(InitialCondition::single_infective(3).validate(&p).is_ok());
    }
}
