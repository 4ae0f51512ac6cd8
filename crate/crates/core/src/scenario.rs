//! Scenario files: named spaces, ideals, grids, maps, games and translations,
//! plus the commands to run on them. Every run produces a JSON [`Report`].

use crate::funcspace::{FunctionGrid, GridCondition, GridError, Region};
use crate::game::{s1_holds, solve, GameError, GameSpec, Item, SolveOptions, WinCondition};
use crate::rational::{self, int, Rat};
use crate::setvalued::sawtooth;
use crate::setvalued::{
    bounded_on_compact, convexify, graph_closure, is_continuous, is_minimal_cusco, is_minimal_usco, is_usco,
    vietoris_preimage, CompactSet, PiecewiseFn, RealSet, SetValuedError, SetValuedMap, Verdict, Witness,
};
use crate::topology::{cofinality, is_a_cover, CoverClass, FiniteSpace, IdealFamily, PointSet, TopologyError};
use crate::translation::{
    check_condition_i, check_condition_ii, desk_instance, duality_instances, verify_duality, verify_full_transfer,
    verify_markov_transfer, BuiltinName, DualityInstance, LeqReport, Pairing, TranslationError, TranslationPair,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};
use std::ops::Not;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScenarioError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("validation error: {0}")]
    Validation(String),
    #[error("budget of {0} exceeded")]
    BudgetExceeded(u64),
    #[error("unknown command `{0}`")]
    UnknownCommand(String),
}

impl ScenarioError {
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::BudgetExceeded(_) => 3,
            _ => 2,
        }
    }
}

fn invalid(msg: impl Into<String>) -> ScenarioError {
    ScenarioError::Validation(msg.into())
}

impl From<TopologyError> for ScenarioError {
    fn from(e: TopologyError) -> Self {
        invalid(e.to_string())
    }
}

impl From<SetValuedError> for ScenarioError {
    fn from(e: SetValuedError) -> Self {
        invalid(e.to_string())
    }
}

impl From<GridError> for ScenarioError {
    fn from(e: GridError) -> Self {
        invalid(e.to_string())
    }
}

impl From<GameError> for ScenarioError {
    fn from(e: GameError) -> Self {
        match e {
            GameError::BudgetExceeded { budget } => ScenarioError::BudgetExceeded(budget),
            other => invalid(other.to_string()),
        }
    }
}

impl From<TranslationError> for ScenarioError {
    fn from(e: TranslationError) -> Self {
        match e {
            TranslationError::Game(g) => g.into(),
            other => invalid(other.to_string()),
        }
    }
}

mod rat_pair {
    use crate::rational::{self, Rat};
    use serde::{Deserialize, Deserializer};

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(Rat, Rat), D::Error> {
        use serde::de::Error;
        let [lo, hi] = <[String; 2]>::deserialize(d)?;
        Ok((rational::parse(&lo).map_err(D::Error::custom)?, rational::parse(&hi).map_err(D::Error::custom)?))
    }
}

mod rat_pairs {
    use crate::rational::{self, Rat};
    use serde::{Deserialize, Deserializer};

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(Rat, Rat)>, D::Error> {
        use serde::de::Error;
        let raw = Vec::<[String; 2]>::deserialize(d)?;
        raw.iter()
            .map(|[lo, hi]| {
                Ok((rational::parse(lo).map_err(D::Error::custom)?, rational::parse(hi).map_err(D::Error::custom)?))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceDef {
    Discrete(usize),
    Indiscrete(usize),
    Sierpinski,
    /// The non-trivial open sets; the empty set and the whole space are added.
    Opens {
        points: usize,
        sets: Vec<PointSet>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdealDef {
    pub space: String,
    pub members: Vec<PointSet>,
    /// Close the members under non-empty closed subsets, proper unions and point closures first.
    #[serde(default)]
    pub generate: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GridDef {
    Lattice {
        space: String,
        #[serde(with = "rational::serde_rat_vec")]
        values: Vec<Rat>,
        ideal: String,
    },
    Maps {
        #[serde(with = "rat_pair")]
        domain: (Rat, Rat),
        members: Vec<String>,
        ideal: Vec<CompactSet>,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Hull {
    /// The map as given.
    #[default]
    None,
    /// Closure of the graph.
    Closure,
    /// Closure of the graph, then convex sections.
    Convex,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSource {
    /// Indicator of `on` over `domain`.
    Indicator {
        #[serde(with = "rat_pair")]
        domain: (Rat, Rat),
        #[serde(with = "rat_pair")]
        on: (Rat, Rat),
    },
    Function(PiecewiseFn),
    Map(SetValuedMap),
    Constant {
        #[serde(with = "rat_pair")]
        domain: (Rat, Rat),
        value: CompactSet,
    },
}

#[derive(Debug, Clone, Deserialize)]
pub struct MapDef {
    #[serde(flatten)]
    pub source: MapSource,
    #[serde(default)]
    pub hull: Hull,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PoolDef {
    /// Items as raw numbers: bitmasks for open sets, indices for points and grid members.
    Raw(Vec<Vec<Item>>),
    /// Moves of open sets, each given by its points.
    Opens(Vec<Vec<PointSet>>),
    /// Moves of grid members, by id.
    Members {
        grid: String,
        moves: Vec<Vec<String>>,
    },
    /// Every family of at most `max_size` proper open sets that covers the space
    /// (or, given an ideal, puts each ideal member inside one of its sets).
    Covers {
        space: String,
        ideal: Option<String>,
        max_size: usize,
    },
    /// The proper open sets around each ideal member (or each point).
    NeighborhoodFilters {
        space: String,
        ideal: Option<String>,
    },
    /// Non-empty open sets as sets of points.
    NonemptyOpens {
        space: String,
    },
    /// Open sets containing `point`, as sets of points.
    NeighborhoodsOf {
        space: String,
        point: usize,
    },
    DenseSets {
        space: String,
    },
    /// Sets of points with `point` in their closure.
    ClusterSets {
        space: String,
        point: usize,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WinDef {
    Always,
    Not(Box<WinDef>),
    Class {
        space: String,
        #[serde(flatten)]
        class: CoverClass,
    },
    Grid {
        grid: String,
        #[serde(flatten)]
        condition: GridCondition,
    },
    Table(Vec<Vec<Item>>),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameDef {
    pub horizon: usize,
    pub pool: PoolDef,
    pub win: WinDef,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TranslationDef {
    Builtin(BuiltinName),
    /// Translations applied left to right: source of the first, target of the last.
    Compose(Vec<String>),
    /// `t_one[turn][h_move]` is a move index of `g`; `t_two[turn][h_move][k]`
    /// is the index in the H-move of the answer to item `k` of that G-move.
    Table {
        g: String,
        h: String,
        t_one: Vec<Vec<usize>>,
        t_two: Vec<Vec<Vec<usize>>>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CommandDef {
    Solve {
        game: String,
    },
    VerifyDuality {
        g: String,
        h: String,
        pairing: Pairing,
    },
    /// Every admissible instance on every space with at most `max_points` points.
    DualitySuite {
        max_points: usize,
        max_pool: usize,
        max_horizon: usize,
    },
    VerifyTranslation {
        translation: String,
    },
    AnalyzeMap {
        map: String,
        #[serde(default, with = "rat_pairs")]
        basics: Vec<(Rat, Rat)>,
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default)]
        probes: usize,
    },
    Examples {
        #[serde(default = "default_trunc")]
        n_trunc: usize,
    },
    Cof {
        ideal: String,
        of: Option<String>,
    },
}

fn default_samples() -> usize {
    64
}

fn default_trunc() -> usize {
    50
}

impl CommandDef {
    /// The CLI command that runs this entry.
    pub fn kind(&self) -> &'static str {
        match self {
            CommandDef::Solve { .. } => "solve",
            CommandDef::VerifyDuality { .. } | CommandDef::DualitySuite { .. } => "verify-duality",
            CommandDef::VerifyTranslation { .. } => "verify-translation",
            CommandDef::AnalyzeMap { .. } => "analyze-map",
            CommandDef::Examples { .. } => "examples",
            CommandDef::Cof { .. } => "cof",
        }
    }
}

pub const COMMANDS: [&str; 6] = ["solve", "verify-duality", "verify-translation", "analyze-map", "examples", "cof"];

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub spaces: BTreeMap<String, SpaceDef>,
    #[serde(default)]
    pub ideals: BTreeMap<String, IdealDef>,
    #[serde(default)]
    pub maps: BTreeMap<String, MapDef>,
    #[serde(default)]
    pub grids: BTreeMap<String, GridDef>,
    #[serde(default)]
    pub games: BTreeMap<String, GameDef>,
    #[serde(default)]
    pub translations: BTreeMap<String, TranslationDef>,
    #[serde(default)]
    pub commands: Vec<CommandDef>,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        serde_json::from_str(text).map_err(|e| ScenarioError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }
}

/// A translation with the games it goes between.
#[derive(Clone)]
pub struct ResolvedTranslation {
    pub pair: TranslationPair,
    pub g: GameSpec,
    pub h: GameSpec,
    pub surrogates: Vec<String>,
}

/// All references of a scenario resolved to values.
pub struct Registry {
    pub spaces: BTreeMap<String, Arc<FiniteSpace>>,
    pub ideals: BTreeMap<String, (String, Vec<PointSet>)>,
    pub maps: BTreeMap<String, SetValuedMap>,
    pub grids: BTreeMap<String, Arc<FunctionGrid>>,
    pub games: BTreeMap<String, GameSpec>,
    pub translations: BTreeMap<String, ResolvedTranslation>,
}

fn lookup<'a, T>(table: &'a BTreeMap<String, T>, kind: &str, name: &str) -> Result<&'a T, ScenarioError> {
    table.get(name).ok_or_else(|| invalid(format!("unknown {kind} `{name}`")))
}

/// Closes `seed` into an ideal of closed sets of `space`.
pub fn generate_ideal(space: &FiniteSpace, seed: &[PointSet]) -> Vec<PointSet> {
    let full = space.full();
    let closed: Vec<PointSet> = space.closed_sets().into_iter().filter(|c| !c.is_empty() && *c != full).collect();
    let mut members: BTreeSet<PointSet> = seed.iter().copied().collect();
    for x in 0..space.point_count() {
        let c = space.closure(PointSet::singleton(x));
        if c != full {
            members.insert(c);
        }
    }
    loop {
        let before = members.len();
        let current: Vec<PointSet> = members.iter().copied().collect();
        for &a in &current {
            members.extend(closed.iter().copied().filter(|c| c.is_subset(a)));
            for &b in &current {
                let u = a.union(b);
                if u != full {
                    members.insert(u);
                }
            }
        }
        if members.len() == before {
            return members.into_iter().collect();
        }
    }
}

fn open_bits(sets: &[PointSet]) -> Vec<Item> {
    sets.iter().map(|u| u.0).collect()
}

fn point_items(s: PointSet) -> Vec<Item> {
    s.iter().map(|x| x as Item).collect()
}

impl Registry {
    pub fn build(sc: &Scenario) -> Result<Self, ScenarioError> {
        let mut reg = Registry {
            spaces: BTreeMap::new(),
            ideals: BTreeMap::new(),
            maps: BTreeMap::new(),
            grids: BTreeMap::new(),
            games: BTreeMap::new(),
            translations: BTreeMap::new(),
        };
        for (name, def) in &sc.spaces {
            let space = match def {
                SpaceDef::Discrete(n) if *n <= crate::topology::MAX_POINTS => FiniteSpace::discrete(*n),
                SpaceDef::Indiscrete(n) if *n <= crate::topology::MAX_POINTS => FiniteSpace::indiscrete(*n),
                SpaceDef::Discrete(n) | SpaceDef::Indiscrete(n) => {
                    return Err(invalid(format!("space `{name}`: {n} points is too many")))
                }
                SpaceDef::Sierpinski => FiniteSpace::sierpinski(),
                SpaceDef::Opens { points, sets } => {
                    let mut all = sets.clone();
                    all.push(PointSet::EMPTY);
                    all.push(PointSet::full((*points).min(crate::topology::MAX_POINTS)));
                    FiniteSpace::new(*points, all).map_err(|e| invalid(format!("space `{name}`: {e}")))?
                }
            };
            reg.spaces.insert(name.clone(), Arc::new(space));
        }
        for (name, def) in &sc.ideals {
            let space = lookup(&reg.spaces, "space", &def.space)?;
            let members = if def.generate { generate_ideal(space, &def.members) } else { def.members.clone() };
            let ideal = IdealFamily::new(space, members).map_err(|e| invalid(format!("ideal `{name}`: {e}")))?;
            reg.ideals.insert(name.clone(), (def.space.clone(), ideal.members().to_vec()));
        }
        for (name, def) in &sc.maps {
            reg.maps.insert(name.clone(), build_map(def).map_err(|e| invalid(format!("map `{name}`: {e}")))?);
        }
        for (name, def) in &sc.grids {
            let grid = match def {
                GridDef::Lattice { space, values, ideal } => {
                    let sp = lookup(&reg.spaces, "space", space)?;
                    let (_, members) = lookup(&reg.ideals, "ideal", ideal)?;
                    FunctionGrid::lattice((**sp).clone(), values, members.iter().copied().map(Region::Points).collect())
                }
                GridDef::Maps { domain, members, ideal } => {
                    let named = members
                        .iter()
                        .map(|m| Ok((m.clone(), lookup(&reg.maps, "map", m)?.clone())))
                        .collect::<Result<Vec<_>, ScenarioError>>()?;
                    FunctionGrid::maps(
                        domain.0.clone(),
                        domain.1.clone(),
                        named,
                        ideal.iter().cloned().map(Region::Compact).collect(),
                    )
                }
            }
            .map_err(|e| invalid(format!("grid `{name}`: {e}")))?;
            reg.grids.insert(name.clone(), Arc::new(grid));
        }
        for (name, def) in &sc.games {
            let pool = reg.pool(&def.pool).map_err(|e| invalid(format!("game `{name}`: {e}")))?;
            let win = reg.win(&def.win)?;
            let game = GameSpec::new(def.horizon, pool, win).map_err(|e| invalid(format!("game `{name}`: {e}")))?;
            reg.games.insert(name.clone(), game);
        }
        // compositions may refer to translations defined under any name
        let mut pending: Vec<(&String, &TranslationDef)> = sc.translations.iter().collect();
        while !pending.is_empty() {
            let before = pending.len();
            let mut rest = Vec::new();
            for (name, def) in pending {
                match def {
                    TranslationDef::Compose(parts) if parts.iter().any(|p| !reg.translations.contains_key(p)) => {
                        if let Some(p) = parts.iter().find(|p| !sc.translations.contains_key(*p)) {
                            return Err(invalid(format!("unknown translation `{p}`")));
                        }
                        rest.push((name, def));
                    }
                    _ => {
                        let t = reg.translation(def).map_err(|e| invalid(format!("translation `{name}`: {e}")))?;
                        reg.translations.insert(name.clone(), t);
                    }
                }
            }
            if rest.len() == before {
                return Err(invalid("translations compose in a cycle"));
            }
            pending = rest;
        }
        Ok(reg)
    }

    fn ideal_or_points(&self, space: &FiniteSpace, ideal: &Option<String>) -> Result<Vec<PointSet>, ScenarioError> {
        Ok(match ideal {
            Some(i) => lookup(&self.ideals, "ideal", i)?.1.clone(),
            None => (0..space.point_count()).map(PointSet::singleton).collect(),
        })
    }

    fn pool(&self, def: &PoolDef) -> Result<Vec<Vec<Item>>, ScenarioError> {
        let space = |name: &str| lookup(&self.spaces, "space", name).cloned();
        Ok(match def {
            PoolDef::Raw(p) => p.clone(),
            PoolDef::Opens(p) => p.iter().map(|m| open_bits(m)).collect(),
            PoolDef::Members { grid, moves } => {
                let g = lookup(&self.grids, "grid", grid)?;
                moves
                    .iter()
                    .map(|m| {
                        m.iter()
                            .map(|id| {
                                g.index_of(id)
                                    .map(|i| i as Item)
                                    .ok_or_else(|| invalid(format!("unknown member `{id}`")))
                            })
                            .collect()
                    })
                    .collect::<Result<_, _>>()?
            }
            PoolDef::Covers { space: s, ideal, max_size } => {
                let sp = space(s)?;
                let ideal = match ideal {
                    Some(i) => lookup(&self.ideals, "ideal", i)?.1.clone(),
                    None => Vec::new(),
                };
                let opens = sp.proper_opens();
                if opens.len() > 20 {
                    return Err(invalid("too many open sets to enumerate covers"));
                }
                let mut out = Vec::new();
                for mask in 1u32..1 << opens.len() {
                    if mask.count_ones() as usize > *max_size {
                        continue;
                    }
                    let fam: Vec<PointSet> =
                        (0..opens.len()).filter(|i| mask >> i & 1 == 1).map(|i| opens[i]).collect();
                    if is_a_cover(&sp, &ideal, &fam)? {
                        out.push(open_bits(&fam));
                    }
                }
                out
            }
            PoolDef::NeighborhoodFilters { space: s, ideal } => {
                let sp = space(s)?;
                self.ideal_or_points(&sp, ideal)?
                    .iter()
                    .map(|&a| open_bits(&sp.neighborhoods_of(a)))
                    .filter(|m| !m.is_empty())
                    .collect()
            }
            PoolDef::NonemptyOpens { space: s } => {
                space(s)?.opens().iter().filter(|u| !u.is_empty()).map(|&u| point_items(u)).collect()
            }
            PoolDef::NeighborhoodsOf { space: s, point } => {
                let sp = space(s)?;
                if *point >= sp.point_count() {
                    return Err(invalid(format!("point {point} out of range")));
                }
                sp.opens().iter().filter(|u| u.contains(*point)).map(|&u| point_items(u)).collect()
            }
            PoolDef::DenseSets { space: s } => space(s)?.dense_sets().into_iter().map(point_items).collect(),
            PoolDef::ClusterSets { space: s, point } => {
                let sp = space(s)?;
                if *point >= sp.point_count() {
                    return Err(invalid(format!("point {point} out of range")));
                }
                sp.cluster_sets(*point).into_iter().map(point_items).collect()
            }
        })
    }

    fn win(&self, def: &WinDef) -> Result<WinCondition, ScenarioError> {
        Ok(match def {
            WinDef::Always => WinCondition::Always,
            WinDef::Not(inner) => self.win(inner)?.not(),
            WinDef::Class { space, class } => {
                let sp = lookup(&self.spaces, "space", space)?;
                class.validate(sp)?;
                WinCondition::class(sp, class.clone())
            }
            WinDef::Grid { grid, condition } => WinCondition::Grid {
                grid: Arc::clone(lookup(&self.grids, "grid", grid)?),
                condition: condition.clone(),
            },
            WinDef::Table(rows) => WinCondition::Table(rows.iter().cloned().collect()),
        })
    }

    fn translation(&self, def: &TranslationDef) -> Result<ResolvedTranslation, ScenarioError> {
        match def {
            TranslationDef::Builtin(name) => {
                let d = desk_instance(*name)?;
                Ok(ResolvedTranslation { pair: d.pair, g: d.g, h: d.h, surrogates: d.surrogates })
            }
            TranslationDef::Compose(parts) => {
                let mut it = parts.iter();
                let first = it.next().ok_or_else(|| invalid("empty composition"))?;
                let mut acc = lookup(&self.translations, "translation", first)?.clone();
                for p in it {
                    let next = lookup(&self.translations, "translation", p)?;
                    if acc.h.pool() != next.g.pool() || acc.h.horizon() != next.g.horizon() {
                        return Err(invalid(format!("`{p}` does not start where the previous translation ends")));
                    }
                    acc = ResolvedTranslation {
                        pair: acc.pair.compose(&next.pair),
                        g: acc.g,
                        h: next.h.clone(),
                        surrogates: acc.surrogates.into_iter().chain(next.surrogates.iter().cloned()).collect(),
                    };
                }
                Ok(acc)
            }
            TranslationDef::Table { g, h, t_one, t_two } => {
                let (g, h) = (lookup(&self.games, "game", g)?.clone(), lookup(&self.games, "game", h)?.clone());
                table_pair(&g, &h, t_one.clone(), t_two.clone()).map(|pair| ResolvedTranslation {
                    pair,
                    g,
                    h,
                    surrogates: vec![],
                })
            }
        }
    }
}

fn table_pair(
    g: &GameSpec,
    h: &GameSpec,
    t_one: Vec<Vec<usize>>,
    t_two: Vec<Vec<Vec<usize>>>,
) -> Result<TranslationPair, ScenarioError> {
    let turns = h.horizon();
    if t_one.len() != turns || t_two.len() != turns {
        return Err(invalid("translation tables need one row per turn"));
    }
    for n in 0..turns {
        if t_one[n].len() != h.pool().len() || t_two[n].len() != h.pool().len() {
            return Err(invalid(format!("turn {n}: one entry per move of the target game is required")));
        }
        for (b, &gm) in t_one[n].iter().enumerate() {
            let g_move = g.pool().get(gm).ok_or_else(|| invalid(format!("turn {n}: no source move {gm}")))?;
            if t_two[n][b].len() != g_move.len() || t_two[n][b].iter().any(|&k| k >= h.pool()[b].len()) {
                return Err(invalid(format!("turn {n}, move {b}: answer row does not fit the moves")));
            }
        }
    }
    let (g_pool, h_pool) = (g.pool().to_vec(), h.pool().to_vec());
    let (g2, h2) = (g_pool.clone(), h_pool.clone());
    let t1 = t_one.clone();
    let find = |pool: &[Vec<Item>], mv: &[Item]| pool.iter().position(|m| m.as_slice() == mv);
    Ok(TranslationPair::new(
        "table",
        move |n, b| find(&h_pool, b).map(|bi| g_pool[t1[n][bi]].clone()).unwrap_or_default(),
        move |n, x, b| {
            let bi = find(&h2, b)?;
            let k = g2[t_one[n][bi]].iter().position(|&y| y == x)?;
            Some(h2[bi][t_two[n][bi][k]])
        },
    ))
}

fn build_map(def: &MapDef) -> Result<SetValuedMap, SetValuedError> {
    let (base, f) = match &def.source {
        MapSource::Indicator { domain, on } => {
            let f = PiecewiseFn::indicator(domain.0.clone(), domain.1.clone(), on.0.clone(), on.1.clone())?;
            (SetValuedMap::from_function(&f), Some(f))
        }
        MapSource::Function(f) => {
            let f = f.clone().validated()?;
            (SetValuedMap::from_function(&f), Some(f))
        }
        MapSource::Map(m) => (m.clone().validated()?, None),
        MapSource::Constant { domain, value } => {
            (SetValuedMap::constant(domain.0.clone(), domain.1.clone(), value.clone())?, None)
        }
    };
    Ok(match (def.hull, f) {
        (Hull::None, _) => base,
        (Hull::Closure, Some(f)) => graph_closure(&f),
        (Hull::Convex, Some(f)) => convexify(&graph_closure(&f)),
        (Hull::Closure, None) => base,
        (Hull::Convex, None) => convexify(&base),
    })
}

/// Wall-clock timing; reads zero where the platform has no clock (browsers).
struct Clock(#[cfg(not(target_arch = "wasm32"))] std::time::Instant);

impl Clock {
    fn start() -> Self {
        Clock(
            #[cfg(not(target_arch = "wasm32"))]
            std::time::Instant::now(),
        )
    }

    fn millis(&self) -> u64 {
        #[cfg(not(target_arch = "wasm32"))]
        return self.0.elapsed().as_millis() as u64;
        #[cfg(target_arch = "wasm32")]
        return 0;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub seed: u64,
    pub budget: u64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { seed: 0, budget: crate::game::DEFAULT_BUDGET }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: String,
    pub seed: u64,
    pub budget: u64,
    pub results: Vec<Value>,
    /// Some result stands in for a statement about infinite games or spaces.
    pub caveat: bool,
    /// Property checks that found a counterexample.
    pub failures: Vec<String>,
    /// Wall-clock time; the only field that differs between identical runs.
    pub timing_ms: u64,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.failures.is_empty() {
            0
        } else {
            4
        }
    }

    /// The report as JSON with the timing field removed.
    pub fn stable_json(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("reports serialize");
        v.as_object_mut().expect("an object").remove("timing_ms");
        v
    }
}

/// A report plus CSV band samples from `analyze-map`.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: Report,
    pub csv: Option<String>,
}

struct Ctx {
    results: Vec<Value>,
    caveat: bool,
    failures: Vec<String>,
    csv: Option<String>,
}

pub fn run_text(text: &str, command: &str, opts: &RunOptions) -> Result<Outcome, ScenarioError> {
    run(&Scenario::parse(text)?, command, opts)
}

pub fn run(sc: &Scenario, command: &str, opts: &RunOptions) -> Result<Outcome, ScenarioError> {
    if !COMMANDS.contains(&command) {
        return Err(ScenarioError::UnknownCommand(command.to_string()));
    }
    let clock = Clock::start();
    let reg = Registry::build(sc)?;
    let mut entries: Vec<CommandDef> = sc.commands.iter().filter(|c| c.kind() == command).cloned().collect();
    if entries.is_empty() {
        if command == "examples" {
            entries.push(CommandDef::Examples { n_trunc: default_trunc() });
        } else {
            return Err(invalid(format!("the scenario has no `{command}` commands")));
        }
    }
    let mut ctx = Ctx { results: Vec::new(), caveat: false, failures: Vec::new(), csv: None };
    let solve_opts = SolveOptions { budget: opts.budget };
    for entry in &entries {
        match entry {
            CommandDef::Solve { game } => {
                let g = lookup(&reg.games, "game", game)?;
                let r = solve(g, &solve_opts)?;
                let s1 = s1_holds(g, &solve_opts)?;
                ctx.caveat = true;
                ctx.results.push(json!({
                    "game": game,
                    "horizon": g.horizon(),
                    "moves": g.pool().len(),
                    "win": g.win().describe(),
                    "s1_holds": s1,
                    "report": r,
                    "caveat": true,
                }));
            }
            CommandDef::VerifyDuality { g, h, pairing } => {
                let inst = DualityInstance {
                    g: lookup(&reg.games, "game", g)?.clone(),
                    h: lookup(&reg.games, "game", h)?.clone(),
                    pairing: *pairing,
                };
                let r = verify_duality(&inst, &solve_opts)?;
                if r.admissibility.holds() && !r.all_hold() {
                    ctx.failures.push(format!("duality of `{g}` and `{h}` fails"));
                }
                ctx.caveat = true;
                ctx.results.push(json!({ "g": g, "h": h, "report": r }));
            }
            CommandDef::DualitySuite { max_points, max_pool, max_horizon } => {
                let v = duality_suite(*max_points, *max_pool, *max_horizon, &solve_opts)?;
                if v.failed > 0 {
                    ctx.failures.push(format!("{} duality instances fail", v.failed));
                }
                ctx.caveat = true;
                ctx.results.push(serde_json::to_value(v).expect("serializable"));
            }
            CommandDef::VerifyTranslation { translation } => {
                let t = lookup(&reg.translations, "translation", translation)?;
                let v = verify_translation(t, &solve_opts)?;
                if !v.sound() {
                    ctx.failures.push(format!("translation `{translation}` fails its checks"));
                }
                ctx.caveat = true;
                let mut value = serde_json::to_value(&v).expect("serializable");
                value["translation"] = json!(translation);
                ctx.results.push(value);
            }
            CommandDef::AnalyzeMap { map, basics, samples, probes } => {
                let phi = lookup(&reg.maps, "map", map)?;
                let analysis = analyze_map(map, phi, basics, *probes, opts.seed)?;
                ctx.results.push(serde_json::to_value(analysis).expect("serializable"));
                let csv = ctx.csv.get_or_insert_with(|| "map,x,lo,hi,x_approx,lo_approx,hi_approx\n".to_string());
                csv.push_str(&band_csv(map, phi, *samples));
            }
            CommandDef::Examples { n_trunc } => {
                ctx.caveat = true;
                ctx.results.push(json!({
                    "indicator_hull": indicator_hull_report()?,
                    "sawtooth": sawtooth::analyze(*n_trunc),
                    "caveat": true,
                }));
            }
            CommandDef::Cof { ideal, of } => {
                let (_, a) = lookup(&reg.ideals, "ideal", ideal)?;
                let b = match of {
                    Some(o) => &lookup(&reg.ideals, "ideal", o)?.1,
                    None => a,
                };
                ctx.results.push(
                    json!({ "ideal": ideal, "of": of.as_deref().unwrap_or(ideal), "cofinality": cofinality(a, b)? }),
                );
            }
        }
    }
    let report = Report {
        command: command.to_string(),
        seed: opts.seed,
        budget: opts.budget,
        results: ctx.results,
        caveat: ctx.caveat,
        failures: ctx.failures,
        timing_ms: clock.millis(),
    };
    Ok(Outcome { report, csv: ctx.csv })
}

#[derive(Debug, Clone, Serialize)]
pub struct TranslationVerdict {
    pub source: String,
    pub target: String,
    pub condition_i: Result<(), String>,
    pub condition_ii: Option<crate::translation::ConditionII>,
    pub source_winner: crate::game::Player,
    pub markov_transfer: Option<crate::translation::TransferCheck>,
    pub full_transfer: Option<crate::translation::TransferCheck>,
    pub leq: LeqReport,
    pub surrogates: Vec<String>,
    /// Condition (ii) was checked only up to the horizon.
    pub caveat: bool,
}

impl TranslationVerdict {
    pub fn sound(&self) -> bool {
        self.condition_i.is_ok()
            && self.condition_ii.as_ref().is_some_and(|c| c.holds)
            && self.markov_transfer.as_ref().is_none_or(|t| t.sound())
            && self.full_transfer.as_ref().is_none_or(|t| t.sound())
    }
}

pub fn verify_translation(t: &ResolvedTranslation, opts: &SolveOptions) -> Result<TranslationVerdict, ScenarioError> {
    let condition_i = match check_condition_i(&t.pair, &t.g, &t.h) {
        Ok(()) => Ok(()),
        Err(TranslationError::ConditionI(msg)) => Err(msg),
        Err(e) => return Err(e.into()),
    };
    let condition_ii = match condition_i {
        Ok(()) => Some(check_condition_ii(&t.pair, t.g.win(), t.h.win(), &t.g, &t.h, opts.budget)?),
        Err(_) => None,
    };
    let g_report = solve(&t.g, opts)?;
    let h_report = solve(&t.h, opts)?;
    let (mut markov_transfer, mut full_transfer) = (None, None);
    if condition_i.is_ok() {
        if let Some(tau) = &g_report.two_markov {
            markov_transfer = Some(verify_markov_transfer(&t.pair, &t.g, &t.h, tau)?);
        }
        if let Some(tau) = &g_report.two_full {
            full_transfer = Some(verify_full_transfer(&t.pair, &t.g, &t.h, tau)?);
        }
    }
    Ok(TranslationVerdict {
        source: t.g.win().describe(),
        target: t.h.win().describe(),
        condition_i,
        condition_ii,
        source_winner: g_report.winner_full,
        markov_transfer,
        full_transfer,
        leq: LeqReport::from_reports(&g_report, &h_report),
        surrogates: t.surrogates.clone(),
        caveat: true,
    })
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct DualitySuite {
    pub instances: usize,
    pub passed: usize,
    pub failed: usize,
    /// Candidate pools that were not reflections of each other.
    pub skipped: usize,
    pub by_pairing: BTreeMap<String, usize>,
    pub first_failure: Option<String>,
}

/// Every admissible instance of the three pairings on every topology with at
/// most `max_points` points (every ideal, every point), horizons `1..=max_horizon`.
pub fn duality_suite(
    max_points: usize,
    max_pool: usize,
    max_horizon: usize,
    opts: &SolveOptions,
) -> Result<DualitySuite, ScenarioError> {
    if max_points > 3 || max_pool > 4 {
        return Err(invalid("the duality suite is limited to 3 points and pools of 4 moves"));
    }
    let mut out = DualitySuite::default();
    for n in 1..=max_points {
        for space in crate::topology::enumerate_topologies(n) {
            let space = Arc::new(space);
            let ideals: Vec<Vec<PointSet>> =
                crate::topology::enumerate_ideals(&space).iter().map(|i| i.members().to_vec()).collect();
            for pairing in [Pairing::Covers, Pairing::DenseOpen, Pairing::ClusterNeighborhood] {
                for horizon in 1..=max_horizon {
                    let (insts, count) = duality_instances(&space, &ideals, pairing, max_pool, horizon);
                    out.skipped += count.skipped;
                    *out.by_pairing.entry(format!("{pairing:?}")).or_default() += insts.len();
                    for inst in insts {
                        out.instances += 1;
                        let r = verify_duality(&inst, opts)?;
                        if r.all_hold() {
                            out.passed += 1;
                        } else {
                            out.failed += 1;
                            out.first_failure.get_or_insert_with(|| format!("{:?} vs {:?}", inst.g, inst.h));
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct Preimage {
    pub basics: Vec<[String; 2]>,
    pub set: RealSet,
    pub is_open: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Probe {
    pub x: String,
    pub section: CompactSet,
}

#[derive(Debug, Clone, Serialize)]
pub struct MapAnalysis {
    pub map: String,
    pub domain: [String; 2],
    pub usco: bool,
    pub usco_witness: Option<Witness>,
    pub minimal_usco: Option<bool>,
    pub minimal_cusco: Option<Verdict>,
    pub continuous: bool,
    pub discontinuity: Option<String>,
    pub bound: Option<String>,
    pub preimages: Vec<Preimage>,
    pub probes: Vec<Probe>,
}

pub fn analyze_map(
    name: &str,
    phi: &SetValuedMap,
    basics: &[(Rat, Rat)],
    probes: usize,
    seed: u64,
) -> Result<MapAnalysis, ScenarioError> {
    let usco = is_usco(phi);
    let continuity = is_continuous(phi);
    let (lo, hi) = phi.domain();
    let mut preimages = Vec::new();
    if !basics.is_empty() {
        // the basic open set of the whole list, then each member alone
        let mut lists = vec![basics.to_vec()];
        if basics.len() > 1 {
            lists.extend(basics.iter().map(|b| vec![b.clone()]));
        }
        for list in lists {
            let (set, is_open) = vietoris_preimage(phi, &list)?;
            preimages.push(Preimage {
                basics: list.iter().map(|(a, b)| [rational::format(a), rational::format(b)]).collect(),
                set,
                is_open,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let probes = (0..probes)
        .map(|_| {
            let k: i64 = rng.gen_range(0..=1024);
            let x = lo + (hi - lo) * rational::rat(k, 1024);
            let section = phi.section(&x).expect("inside the domain");
            Probe { x: rational::format(&x), section }
        })
        .collect();
    Ok(MapAnalysis {
        map: name.to_string(),
        domain: [rational::format(lo), rational::format(hi)],
        usco: usco.is_ok(),
        usco_witness: usco.clone().err(),
        minimal_usco: if usco.is_ok() { Some(is_minimal_usco(phi)?) } else { None },
        minimal_cusco: if usco.is_ok() { Some(is_minimal_cusco(phi)?) } else { None },
        continuous: continuity.is_ok(),
        discontinuity: continuity.err().map(|x| rational::format(&x)),
        bound: if usco.is_ok() { Some(rational::format(&bounded_on_compact(phi)?)) } else { None },
        preimages,
        probes,
    })
}

/// Sections at `samples + 1` evenly spaced points and at every breakpoint, one
/// CSV row per interval of each section.
pub fn band_csv(name: &str, phi: &SetValuedMap, samples: usize) -> String {
    let (lo, hi) = phi.domain();
    let steps = samples.max(1) as i64;
    let mut xs: BTreeSet<Rat> = (0..=steps).map(|k| lo + (hi - lo) * rational::rat(k, steps)).collect();
    xs.extend(phi.breakpoints().iter().cloned());
    let mut out = String::new();
    for x in xs {
        let section = phi.section(&x).expect("inside the domain");
        for iv in section.intervals() {
            out.push_str(&format!(
                "{name},{},{},{},{},{},{}\n",
                rational::format(&x),
                rational::format(&iv.lo),
                rational::format(&iv.hi),
                rational::to_f64(&x),
                rational::to_f64(&iv.lo),
                rational::to_f64(&iv.hi)
            ));
        }
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct IndicatorHullReport {
    pub minimal_cusco: Verdict,
    pub continuous: bool,
    pub discontinuity: Option<String>,
    pub preimage: Preimage,
}

/// The closed convex hull of the indicator of `[0, 1]` on `[-1, 2]`: a minimal
/// cusco map that is not continuous, with a non-open Vietoris preimage.
pub fn indicator_hull() -> SetValuedMap {
    let f = PiecewiseFn::indicator(int(-1), int(2), int(0), int(1)).expect("valid indicator");
    convexify(&graph_closure(&f))
}

pub fn indicator_hull_report() -> Result<IndicatorHullReport, ScenarioError> {
    let phi = indicator_hull();
    let basics = vec![(rational::rat(-1, 2), rational::rat(3, 4)), (rational::rat(1, 4), rational::rat(3, 2))];
    let (set, is_open) = vietoris_preimage(&phi, &basics)?;
    let continuity = is_continuous(&phi);
    Ok(IndicatorHullReport {
        minimal_cusco: is_minimal_cusco(&phi)?,
        continuous: continuity.is_ok(),
        discontinuity: continuity.err().map(|x| rational::format(&x)),
        preimage: Preimage {
            basics: basics.iter().map(|(a, b)| [rational::format(a), rational::format(b)]).collect(),
            set,
            is_open,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setvalued::Span;

    const PAIRS: &str = r#"{
        "spaces": { "D3": { "discrete": 3 } },
        "ideals": { "pairs": { "space": "D3", "members": [[0, 1], [0, 2], [1, 2]], "generate": true } },
        "commands": [ { "command": "cof", "ideal": "pairs" } ]
    }"#;

    #[test]
    fn cofinality_of_pairs() {
        let out = run_text(PAIRS, "cof", &RunOptions::default()).unwrap();
        assert_eq!(out.report.results[0]["cofinality"], json!(3));
        assert!(!out.report.caveat);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let err = Scenario::parse("{\n  \"spaces\": [").unwrap_err();
        assert!(matches!(err, ScenarioError::Parse { line: 2, .. }), "{err:?}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn dangling_references_fail_validation() {
        let text = r#"{ "games": { "g": { "horizon": 1, "pool": { "nonempty_opens": { "space": "nowhere" } }, "win": "always" } },
                        "commands": [ { "command": "solve", "game": "g" } ] }"#;
        assert!(matches!(run_text(text, "solve", &RunOptions::default()), Err(ScenarioError::Validation(_))));
        assert!(matches!(run_text(PAIRS, "fly", &RunOptions::default()), Err(ScenarioError::UnknownCommand(_))));
        assert!(matches!(run_text(PAIRS, "solve", &RunOptions::default()), Err(ScenarioError::Validation(_))));
    }

    #[test]
    fn trivial_game_and_budget() {
        let text = r#"{ "games": { "g": { "horizon": 2, "pool": { "raw": [[1, 2], [3]] }, "win": "always" } },
                        "commands": [ { "command": "solve", "game": "g" } ] }"#;
        let out = run_text(text, "solve", &RunOptions::default()).unwrap();
        let r = &out.report.results[0]["report"];
        assert_eq!(r["winner_full"], json!("Two"));
        assert_eq!(r["two_has_markov"], json!(true));
        let err = run_text(text, "solve", &RunOptions { seed: 0, budget: 1 }).unwrap_err();
        assert_eq!(err, ScenarioError::BudgetExceeded(1));
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn indicator_hull_matches_hand_computation() {
        let r = indicator_hull_report().unwrap();
        assert_eq!(r.minimal_cusco, Verdict::Yes);
        assert!(!r.continuous);
        assert_eq!(r.preimage.set, RealSet::new(vec![Span::point(int(0)), Span::point(int(1))]));
        assert!(!r.preimage.is_open);
    }

    #[test]
    fn table_translation_and_composition() {
        let text = r#"{
            "spaces": { "D2": { "discrete": 2 } },
            "games": {
                "r": { "horizon": 2, "pool": { "opens": [[[0], [1]]] }, "win": { "class": { "space": "D2", "class": "open_cover" } } }
            },
            "translations": {
                "same": { "table": { "g": "r", "h": "r", "t_one": [[0], [0]], "t_two": [[[0, 1]], [[0, 1]]] } },
                "flip": { "table": { "g": "r", "h": "r", "t_one": [[0], [0]], "t_two": [[[1, 0]], [[0, 0]]] } },
                "twice": { "compose": ["same", "same"] },
                "desk": { "builtin": "DENSE_TO_COVERS" }
            },
            "commands": [
                { "command": "verify-translation", "translation": "twice" },
                { "command": "verify-translation", "translation": "desk" },
                { "command": "verify-translation", "translation": "flip" }
            ]
        }"#;
        let out = run_text(text, "verify-translation", &RunOptions::default()).unwrap();
        assert_eq!(out.report.results.len(), 3);
        assert_eq!(out.report.failures, vec!["translation `flip` fails its checks".to_string()]);
        assert_eq!(out.report.exit_code(), 4);
        assert_eq!(out.report.results[0]["condition_ii"]["holds"], json!(true));
    }

    #[test]
    fn analyze_map_emits_csv_and_is_deterministic() {
        let text = r#"{
            "maps": { "hull": { "indicator": { "domain": ["-1", "2"], "on": ["0", "1"] }, "hull": "convex" } },
            "commands": [ { "command": "analyze-map", "map": "hull", "basics": [["-1/2", "3/4"], ["1/4", "3/2"]], "samples": 6, "probes": 5 } ]
        }"#;
        let opts = RunOptions { seed: 7, budget: 1000 };
        let a = run_text(text, "analyze-map", &opts).unwrap();
        let b = run_text(text, "analyze-map", &opts).unwrap();
        assert_eq!(a.report.stable_json(), b.report.stable_json());
        let r = &a.report.results[0];
        assert_eq!(r["minimal_cusco"], json!("yes"));
        assert_eq!(r["continuous"], json!(false));
        assert_eq!(r["preimages"][0]["is_open"], json!(false));
        let csv = a.csv.unwrap();
        assert!(csv.starts_with("map,x,lo,hi"));
        assert!(csv.contains("hull,0,0,1,"));
        assert_eq!(r["probes"].as_array().unwrap().len(), 5);
    }

    #[test]
    fn generated_ideal_is_valid() {
        let sp = FiniteSpace::discrete(3);
        let members = generate_ideal(&sp, &[PointSet::from_points([0, 1])]);
        assert!(IdealFamily::new(&sp, members.clone()).is_ok());
        assert_eq!(members.len(), 6);
    }
}
