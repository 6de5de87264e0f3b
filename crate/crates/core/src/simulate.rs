//! Exact event-driven simulation of the three-level SEIR model.
//!
//! When an individual becomes infectious at time `t` for a period `T`, every
//! contact it will make is drawn at once and pushed onto a global time-ordered
//! queue:
//!
//! * household: for each co-member, `Poisson(lambda_H T)` contacts;
//! * group: `Poisson(lambda_G T)` contacts aimed at uniformly chosen members
//!   of its group, so each member is hit at rate `lambda_G / n_j`;
//! * community: `Poisson(lambda_C T)` contacts aimed at uniformly chosen
//!   individuals, each hit at rate `lambda_C / N`.
//!
//! Contact times are uniform on `[t, t + T)`. Self-targets are discarded. A
//! contact infects its target only if the target is still susceptible when the
//! contact fires. Ties are broken by insertion order.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::io::{Read, Write};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{map_range, Execution};
use crate::params::EpidemicParams;
use crate::population::{Example2Layout, InitialCondition, PopulationStructure};

/// One stream per replicate: the ChaCha stream id is the replicate index.
pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Susceptible,
    Exposed,
    Infective,
    Removed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InfectionRecord {
    pub id: usize,
    pub household: usize,
    pub group: usize,
    pub t_inf: f64,
    pub latent: f64,
    pub infectious: f64,
    /// `None` for initial cases.
    pub infector: Option<usize>,
}

impl InfectionRecord {
    pub fn onset(&self) -> f64 {
        self.t_inf + self.latent
    }

    pub fn removal(&self) -> f64 {
        self.t_inf + self.latent + self.infectious
    }

    pub fn is_initial(&self) -> bool {
        self.infector.is_none()
    }
}

/// Complete data: one record per ever-infected individual, in order of
/// infection time.
#[derive(Debug, Clone, PartialEq)]
pub struct EventLog {
    pub records: Vec<InfectionRecord>,
    pub horizon: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRecord {
    id: i64,
    household: i64,
    group: usize,
    t_inf: f64,
    lat_dur: f64,
    inf_dur: f64,
    infector: i64,
}

impl EventLog {
    pub fn final_size(&self) -> usize {
        self.records.len()
    }

    /// Time at which the last infective is removed.
    pub fn end_time(&self) -> f64 {
        self.records.iter().map(InfectionRecord::removal).fold(0.0, f64::max)
    }

    /// Checks that each infector was infectious when its contact landed.
    pub fn check_infectors(&self) -> Result<()> {
        let mut by_id = std::collections::HashMap::with_capacity(self.records.len());
        for r in &self.records {
            if by_id.insert(r.id, *r).is_some() {
                return Err(Error::data(format!("individual {} infected twice", r.id)));
            }
        }
        for r in &self.records {
            if let Some(src) = r.infector {
                let s = by_id
                    .get(&src)
                    .ok_or_else(|| Error::data(format!("infector {src} of {} never infected", r.id)))?;
                if !(s.onset() <= r.t_inf && r.t_inf < s.removal()) {
                    return Err(Error::data(format!(
                        "infector {src} was not infectious when {} was infected at {}",
                        r.id, r.t_inf
                    )));
                }
            }
        }
        Ok(())
    }

    /// `(S, E, I, R)` just after time `t`.
    pub fn compartments_at(&self, n_individuals: usize, t: f64) -> [usize; 4] {
        let mut c = [n_individuals, 0, 0, 0];
        for r in self.records.iter().filter(|r| r.t_inf <= t) {
            c[0] -= 1;
            if t < r.onset() {
                c[1] += 1;
            } else if t < r.removal() {
                c[2] += 1;
            } else {
                c[3] += 1;
            }
        }
        c
    }

    pub fn write_csv<W: Write>(&self, w: W, pop: &PopulationStructure) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for r in &self.records {
            out.serialize(CsvRecord {
                id: pop.label(r.id),
                household: r.household as i64 + 1,
                group: r.group,
                t_inf: r.t_inf,
                lat_dur: r.latent,
                inf_dur: r.infectious,
                infector: r.infector.map_or(-1, |i| pop.label(i)),
            })?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads the CSV written by [`EventLog::write_csv`]. The horizon is set to
    /// the last removal time.
    pub fn read_csv<R: Read>(r: R, pop: &PopulationStructure) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut records = Vec::new();
        let mut seen = vec![false; pop.n_individuals()];
        for row in rdr.deserialize() {
            let row: CsvRecord = row?;
            let id = pop
                .index_of_label(row.id)
                .ok_or_else(|| Error::data(format!("individual {} not in population", row.id)))?;
            if std::mem::replace(&mut seen[id], true) {
                return Err(Error::data(format!("individual {} infected twice", row.id)));
            }
            if row.household - 1 != pop.household_of(id) as i64 || row.group != pop.group_of(id) {
                return Err(Error::data(format!(
                    "household/group of individual {} disagree with the population",
                    row.id
                )));
            }
            let times = [row.t_inf, row.lat_dur, row.inf_dur];
            if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
                return Err(Error::data(format!("bad times for individual {}", row.id)));
            }
            let infector = if row.infector < 0 {
                None
            } else {
                Some(
                    pop.index_of_label(row.infector)
                        .ok_or_else(|| Error::data(format!("unknown infector {}", row.infector)))?,
                )
            };
            records.push(InfectionRecord {
                id,
                household: pop.household_of(id),
                group: pop.group_of(id),
                t_inf: row.t_inf,
                latent: row.lat_dur,
                infectious: row.inf_dur,
                infector,
            });
        }
        records.sort_by(|a, b| a.t_inf.total_cmp(&b.t_inf));
        let mut log = EventLog { records, horizon: 0.0 };
        log.horizon = log.end_time();
        Ok(log)
    }
}

#[derive(Debug, Clone, Copy)]
enum EventKind {
    Contact { source: usize, target: usize },
    Onset(usize),
    Removal(usize),
}

#[derive(Debug, Clone, Copy)]
struct Event {
    time: f64,
    seq: u64,
    kind: EventKind,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    // reversed: BinaryHeap is a max-heap and we want the earliest event
    fn cmp(&self, other: &Self) -> Ordering {
        other.time.total_cmp(&self.time).then_with(|| other.seq.cmp(&self.seq))
    }
}

struct Run<'a, R: Rng> {
    pop: &'a PopulationStructure,
    params: &'a EpidemicParams,
    rng: &'a mut R,
    status: Vec<Status>,
    record_of: Vec<usize>,
    records: Vec<InfectionRecord>,
    queue: BinaryHeap<Event>,
    seq: u64,
    counts: [usize; 4],
}

impl<R: Rng> Run<'_, R> {
    fn push(&mut self, time: f64, kind: EventKind) {
        self.queue.push(Event {
            time,
            seq: self.seq,
            kind,
        });
        self.seq += 1;
    }

    fn infect(&mut self, id: usize, t: f64, infector: Option<usize>, initially_infective: bool) {
        let latent = if initially_infective {
            0.0
        } else {
            self.params.latent.sample(self.rng)
        };
        let infectious = self.params.infectious.sample(self.rng);
        self.status[id] = Status::Exposed;
        self.counts[0] -= 1;
        self.counts[1] += 1;
        self.record_of[id] = self.records.len();
        self.records.push(InfectionRecord {
            id,
            household: self.pop.household_of(id),
            group: self.pop.group_of(id),
            t_inf: t,
            latent,
            infectious,
            infector,
        });
        self.push(t + latent, EventKind::Onset(id));
    }

    fn poisson(&mut self, mean: f64) -> u64 {
        if mean <= 0.0 {
            return 0;
        }
        Poisson::new(mean).expect("positive mean").sample(self.rng) as u64
    }

    fn onset(&mut self, id: usize, t: f64) {
        self.status[id] = Status::Infective;
        self.counts[1] -= 1;
        self.counts[2] += 1;
        let duration = self.records[self.record_of[id]].infectious;
        let rates = &self.params.rates;
        let (lh, lc) = (rates.household, rates.community);
        let g = self.pop.group_of(id);
        let lg = rates.group_rate(self.pop.rate_class(g));

        // Targets that are no longer susceptible can never be infected again,
        // so their contacts are not queued.
        let h = self.pop.household_of(id);
        for k in 0..self.pop.household_size(h) {
            let target = self.pop.household_members(h)[k];
            if target == id {
                continue;
            }
            let n = self.poisson(lh * duration);
            for _ in 0..n {
                let at = t + duration * self.rng.random::<f64>();
                if self.status[target] == Status::Susceptible {
                    self.push(at, EventKind::Contact { source: id, target });
                }
            }
        }
        let n = self.poisson(lg * duration);
        for _ in 0..n {
            let members = self.pop.group_members(g);
            let target = members[self.rng.random_range(0..members.len())];
            let at = t + duration * self.rng.random::<f64>();
            if target != id && self.status[target] == Status::Susceptible {
                self.push(at, EventKind::Contact { source: id, target });
            }
        }
        let n = self.poisson(lc * duration);
        for _ in 0..n {
            let target = self.rng.random_range(0..self.pop.n_individuals());
            let at = t + duration * self.rng.random::<f64>();
            if target != id && self.status[target] == Status::Susceptible {
                self.push(at, EventKind::Contact { source: id, target });
            }
        }
        self.push(t + duration, EventKind::Removal(id));
    }

    fn run(mut self, init: &InitialCondition) -> EventLog {
        for &i in &init.initially_exposed {
            self.infect(i, 0.0, None, false);
        }
        for &i in &init.initially_infective {
            self.infect(i, 0.0, None, true);
        }
        while let Some(ev) = self.queue.pop() {
            match ev.kind {
                EventKind::Contact { source, target } => {
                    if self.status[target] == Status::Susceptible {
                        self.infect(target, ev.time, Some(source), false);
                    }
                }
                EventKind::Onset(id) => self.onset(id, ev.time),
                EventKind::Removal(id) => {
                    self.status[id] = Status::Removed;
                    self.counts[2] -= 1;
                    self.counts[3] += 1;
                }
            }
            debug_assert_eq!(self.counts.iter().sum::<usize>(), self.pop.n_individuals());
        }
        let mut log = EventLog {
            records: self.records,
            horizon: 0.0,
        };
        log.horizon = log.end_time();
        log
    }
}

/// Simulates one outbreak to extinction using the stream of replicate 0.
pub fn simulate(
    pop: &PopulationStructure,
    params: &EpidemicParams,
    init: &InitialCondition,
    seed: u64,
) -> Result<EventLog> {
    simulate_replicate(pop, params, init, seed, 0)
}

pub fn simulate_replicate(
    pop: &PopulationStructure,
    params: &EpidemicParams,
    init: &InitialCondition,
    seed: u64,
    replicate: u64,
) -> Result<EventLog> {
    params.validate(pop)?;
    init.validate(pop)?;
    let mut rng = replicate_rng(seed, replicate);
    Ok(simulate_with_rng(pop, params, init, &mut rng))
}

/// Runs the simulation on a caller-supplied generator. Inputs are assumed
/// valid.
pub fn simulate_with_rng<R: Rng>(
    pop: &PopulationStructure,
    params: &EpidemicParams,
    init: &InitialCondition,
    rng: &mut R,
) -> EventLog {
    let n = pop.n_individuals();
    Run {
        pop,
        params,
        rng,
        status: vec![Status::Susceptible; n],
        record_of: vec![usize::MAX; n],
        records: Vec::new(),
        queue: BinaryHeap::new(),
        seq: 0,
        counts: [n, 0, 0, 0],
    }
    .run(init)
}

/// Replicates `0..count`, each on its own stream; the output does not depend
/// on `exec`.
pub fn simulate_replicates(
    pop: &PopulationStructure,
    params: &EpidemicParams,
    init: &InitialCondition,
    seed: u64,
    count: usize,
    exec: Execution,
) -> Result<Vec<EventLog>> {
    params.validate(pop)?;
    init.validate(pop)?;
    Ok(map_range(count, exec, |r| {
        let mut rng = replicate_rng(seed, r as u64);
        simulate_with_rng(pop, params, init, &mut rng)
    }))
}

/// Who was infected by the end of the outbreak, with per-household and
/// per-group totals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinalSizeData {
    infected: Vec<bool>,
    per_household: Vec<usize>,
    per_group: Vec<usize>,
    total: usize,
}

impl FinalSizeData {
    pub fn from_infected(pop: &PopulationStructure, infected: Vec<bool>) -> Result<Self> {
        if infected.len() != pop.n_individuals() {
            return Err(Error::data("infection flags do not match the population size"));
        }
        let mut per_household = vec![0; pop.n_households()];
        let mut per_group = vec![0; pop.n_groups() + 1];
        for (i, _) in infected.iter().enumerate().filter(|(_, &x)| x) {
            per_household[pop.household_of(i)] += 1;
            per_group[pop.group_of(i)] += 1;
        }
        let total = per_household.iter().sum();
        Ok(Self {
            infected,
            per_household,
            per_group,
            total,
        })
    }

    pub fn is_infected(&self, i: usize) -> bool {
        self.infected[i]
    }

    pub fn per_household(&self) -> &[usize] {
        &self.per_household
    }

    /// Indexed by group id; entry 0 is the dummy group.
    pub fn per_group(&self) -> &[usize] {
        &self.per_group
    }

    pub fn total(&self) -> usize {
        self.total
    }

    /// `(infected children, infected female, infected male)` per household.
    pub fn triples(&self, layout: &Example2Layout) -> Vec<[u8; 3]> {
        layout
            .households
            .iter()
            .map(|h| {
                [
                    h.children.iter().filter(|&&c| self.infected[c]).count() as u8,
                    self.infected[h.female] as u8,
                    self.infected[h.male] as u8,
                ]
            })
            .collect()
    }

    /// `household,infected` with 1-based household numbers.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["household", "infected"])?;
        for (h, c) in self.per_household.iter().enumerate() {
            out.write_record([(h + 1).to_string(), c.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }

    /// `household,infected_children,infected_females,infected_males`.
    pub fn write_triples_csv<W: Write>(&self, w: W, layout: &Example2Layout) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["household", "infected_children", "infected_females", "infected_males"])?;
        for (h, t) in self.triples(layout).iter().enumerate() {
            out.write_record([
                (h + 1).to_string(),
                t[0].to_string(),
                t[1].to_string(),
                t[2].to_string(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads either CSV layout. Counts are assigned to household members in
    /// member order, which is exact when co-members share a group (villages)
    /// or when the triple form is used with a schools/workplaces layout.
    pub fn read_csv<R: Read>(r: R, pop: &PopulationStructure) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let triple = match header.as_slice() {
            [h, i] if h == "household" && i == "infected" => false,
            [h, c, f, m]
                if h == "household" && c == "infected_children" && f == "infected_females" && m == "infected_males" =>
            {
                true
            }
            _ => return Err(Error::data(format!("unrecognised final-size header {header:?}"))),
        };
        let layout = if triple {
            Some(Example2Layout::from_population(pop)?)
        } else {
            None
        };
        let mut infected = vec![false; pop.n_individuals()];
        let mut seen = vec![false; pop.n_households()];
        for row in rdr.records() {
            let row = row?;
            let nums: Vec<usize> = row
                .iter()
                .map(|s| s.trim().parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::data(format!("bad final-size row {row:?}: {e}")))?;
            let h = nums[0]
                .checked_sub(1)
                .filter(|&h| h < pop.n_households())
                .ok_or_else(|| Error::data(format!("unknown household {}", nums[0])))?;
            if std::mem::replace(&mut seen[h], true) {
                return Err(Error::data(format!("household {} listed twice", h + 1)));
            }
            match &layout {
                Some(l) => {
                    let hh = &l.households[h];
                    if nums[1] > 2 || nums[2] > 1 || nums[3] > 1 {
                        return Err(Error::data(format!("counts out of range for household {}", h + 1)));
                    }
                    for &c in hh.children.iter().take(nums[1]) {
                        infected[c] = true;
                    }
                    infected[hh.female] = nums[2] == 1;
                    infected[hh.male] = nums[3] == 1;
                }
                None => {
                    let members = pop.household_members(h);
                    if nums[1] > members.len() {
                        return Err(Error::data(format!(
                            "household {} has {} members but {} infected",
                            h + 1,
                            members.len(),
                            nums[1]
                        )));
                    }
                    for &i in members.iter().take(nums[1]) {
                        infected[i] = true;
                    }
                }
            }
        }
        Self::from_infected(pop, infected)
    }
}

/// Final-size summary of a complete event log.
pub fn final_size(log: &EventLog, pop: &PopulationStructure) -> Result<FinalSizeData> {
    let mut infected = vec![false; pop.n_individuals()];
    for r in &log.records {
        if r.id >= pop.n_individuals() {
            return Err(Error::data(format!("individual {} is not in the population", r.id)));
        }
        infected[r.id] = true;
    }
    FinalSizeData::from_infected(pop, infected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::{ContactRates, PeriodDistribution};
    use crate::population::{build_schools_workplaces, build_villages};

    fn ex1_params(lh: f64, lg: f64, lc: f64) -> EpidemicParams {
        EpidemicParams::fixed(ContactRates::new(lh, vec![lg], lc), 0.0, 1.0)
    }

    #[test]
    fn no_transmission_leaves_single_case() {
        let pop = build_villages(4, 50, 2).unwrap();
        let log = simulate(
            &pop,
            &ex1_params(0.0, 0.0, 0.0),
            &InitialCondition::single_infective(7),
            1,
        )
        .unwrap();
        assert_eq!(log.records.len(), 1);
        let r = log.records[0];
        assert_eq!(
            (r.id, r.t_inf, r.latent, r.infectious, r.infector),
            (7, 0.0, 0.0, 1.0, None)
        );
        let fs = final_size(&log, &pop).unwrap();
        assert_eq!(fs.total(), 1);
        assert_eq!(fs.per_group()[1], 1);
        assert!(fs.per_group()[2..].iter().all(|&z| z == 0));
    }

    #[test]
    fn deterministic_given_seed() {
        let pop = build_villages(2, 100, 2).unwrap();
        let p = ex1_params(0.3, 1.4, 0.1);
        let init = InitialCondition::single_infective(0);
        let a = simulate_replicates(&pop, &p, &init, 11, 8, Execution::Parallel).unwrap();
        let b = simulate_replicates(&pop, &p, &init, 11, 8, Execution::Sequential).unwrap();
        assert_eq!(a, b);
        let mut x = Vec::new();
        let mut y = Vec::new();
        a[3].write_csv(&mut x, &pop).unwrap();
        simulate_replicate(&pop, &p, &init, 11, 3)
            .unwrap()
            .write_csv(&mut y, &pop)
            .unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn logs_are_consistent() {
        let pop = build_schools_workplaces();
        let params = EpidemicParams {
            rates: ContactRates::new(0.3, vec![1.2, 0.6], 0.05),
            latent: PeriodDistribution::Exponential { mean: 0.7 },
            infectious: PeriodDistribution::Gamma { mean: 1.0, shape: 2.0 },
        };
        let init = InitialCondition {
            initially_exposed: vec![5],
            initially_infective: vec![0],
        };
        for rep in 0..5 {
            let log = simulate_replicate(&pop, &params, &init, 3, rep).unwrap();
            log.check_infectors().unwrap();
            let mut times: Vec<f64> = log
                .records
                .iter()
                .flat_map(|r| [r.t_inf, r.onset(), r.removal()])
                .collect();
            times.sort_by(f64::total_cmp);
            for t in times {
                assert_eq!(log.compartments_at(pop.n_individuals(), t).iter().sum::<usize>(), 2000);
            }
            assert!(log.records.windows(2).all(|w| w[0].t_inf <= w[1].t_inf));
        }
    }

    #[test]
    fn csv_round_trip() {
        let pop = build_villages(2, 20, 2).unwrap();
        let log = simulate(
            &pop,
            &ex1_params(0.5, 2.0, 0.2),
            &InitialCondition::single_infective(0),
            4,
        )
        .unwrap();
        let mut buf = Vec::new();
        log.write_csv(&mut buf, &pop).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("id,household,group,t_inf,lat_dur,inf_dur,infector\n"));
        let back = EventLog::read_csv(buf.as_slice(), &pop).unwrap();
        assert_eq!(back, log);
    }

    #[test]
    fn final_size_from_published_counts() {
        // n_1 = (70, 157, 273), n_2 = (65, 178, 257), villages 3 and 4 untouched
        let pop = build_villages(4, 500, 2).unwrap();
        let mut csv = String::from("household,infected\n");
        let villages = [[70, 157, 273], [65, 178, 257], [500, 0, 0], [500, 0, 0]];
        let mut h = 1;
        for v in villages {
            for (k, &count) in v.iter().enumerate() {
                for _ in 0..count {
                    csv.push_str(&format!("{h},{k}\n"));
                    h += 1;
                }
            }
        }
        let fs = FinalSizeData::read_csv(csv.as_bytes(), &pop).unwrap();
        assert_eq!(fs.per_group()[1], 703);
        assert_eq!(fs.per_group()[2], 692);
        assert!(((fs.total() as f64) / 4000.0 - 0.34875).abs() < 1e-12);
    }

    #[test]
    fn triple_csv_round_trip() {
        let pop = build_schools_workplaces();
        let layout = Example2Layout::from_population(&pop).unwrap();
        let params = EpidemicParams::fixed(ContactRates::new(0.3, vec![1.2, 0.6], 0.05), 0.0, 1.0);
        let log = simulate(&pop, &params, &InitialCondition::single_infective(0), 9).unwrap();
        let fs = final_size(&log, &pop).unwrap();
        let mut buf = Vec::new();
        fs.write_triples_csv(&mut buf, &layout).unwrap();
        let back = FinalSizeData::read_csv(buf.as_slice(), &pop).unwrap();
        assert_eq!(back.triples(&layout), fs.triples(&layout));
        assert_eq!(back.per_group(), fs.per_group());
        assert!(FinalSizeData::read_csv("a,b\n1,2\n".as_bytes(), &pop).is_err());
    }

    #[test]
    fn hand_built_two_household_log() {
        let pop = build_villages(1, 2, 2).unwrap();
        let rec = |id, t, infector| InfectionRecord {
            id,
            household: pop.household_of(id),
            group: pop.group_of(id),
            t_inf: t,
            latent: 0.0,
            infectious: 1.0,
            infector,
        };
        let log = EventLog {
            records: vec![rec(0, 0.0, None), rec(1, 0.4, Some(0)), rec(2, 0.9, Some(1))],
            horizon: 2.0,
        };
        log.check_infectors().unwrap();
        let fs = final_size(&log, &pop).unwrap();
        assert_eq!(fs.per_household(), &[2, 1]);
        assert_eq!(fs.total(), 3);

        let bad = EventLog {
            records: vec![rec(0, 0.0, None), rec(1, 1.5, Some(0))],
            horizon: 3.0,
        };
        assert!(bad.check_infectors().is_err());
    }
}
