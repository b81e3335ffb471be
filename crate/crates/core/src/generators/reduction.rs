//! Reduction from 3-bounded 3-dimensional matching to equilibrium
//! existence, its brute-force matching oracle, and a structure-aware
//! equilibrium-existence search for reduced games.

use std::cmp::Ordering;

use crate::error::{GameError, Result};
use crate::equilibrium::is_nash_cached;
use crate::game::{GameInstance, Machine};
use crate::job::ProcessingFunction;
use crate::numeric::{Numeric, NumericMode};
use crate::schedule::{build_schedule, Profile};
use crate::{JobId, MachineId};

/// A 3-bounded 3-dimensional matching instance over ground sets of size
/// `n`: every element occurs in at most 3 triples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThreeDMInstance {
    pub n: usize,
    pub triples: Vec<(usize, usize, usize)>,
}

impl ThreeDMInstance {
    pub fn new(n: usize, triples: Vec<(usize, usize, usize)>) -> Result<Self> {
        if n == 0 {
            return Err(GameError::InvalidInstance("n must be >= 1".into()));
        }
        if triples.len() < n {
            return Err(GameError::InvalidInstance(
                "need at least n triples".into(),
            ));
        }
        let mut seen = std::collections::HashSet::new();
        let mut occ = vec![[0usize; 3]; n];
        for &(x, y, z) in &triples {
            if x >= n || y >= n || z >= n {
                return Err(GameError::InvalidInstance(
                    "triple index out of range".into(),
                ));
            }
            if !seen.insert((x, y, z)) {
                return Err(GameError::InvalidInstance("duplicate triple".into()));
            }
            occ[x][0] += 1;
            occ[y][1] += 1;
            occ[z][2] += 1;
        }
        if occ.iter().any(|o| o.iter().any(|&c| c > 3)) {
            return Err(GameError::InvalidInstance(
                "an element occurs in more than 3 triples".into(),
            ));
        }
        Ok(ThreeDMInstance { n, triples })
    }

    /// Text format: first line `n t`, then `t` lines `x y z` (0-based).
    pub fn parse(text: &str) -> Result<Self> {
        let bad = |msg: &str| GameError::InvalidInstance(format!("3dm parse: {msg}"));
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("missing header"))?;
        let mut parts = header.split_whitespace();
        let n: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad n"))?;
        let t: usize = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad triple count"))?;
        let mut triples = Vec::with_capacity(t);
        for _ in 0..t {
            let line = lines.next().ok_or_else(|| bad("missing triple line"))?;
            let mut ps = line.split_whitespace();
            let mut next = || {
                ps.next()
                    .and_then(|s| s.parse::<usize>().ok())
                    .ok_or_else(|| bad("bad triple entry"))
            };
            triples.push((next()?, next()?, next()?));
        }
        ThreeDMInstance::new(n, triples)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.triples.len());
        for &(x, y, z) in &self.triples {
            out.push_str(&format!("{x} {y} {z}\n"));
        }
        out
    }
}

/// Decides whether a perfect matching of size `n` exists, by backtracking
/// over the X-elements in order.
pub fn solve_3dm_bruteforce(inst: &ThreeDMInstance) -> Result<bool> {
    if inst.triples.len() > 24 {
        return Err(GameError::BudgetExceeded {
            needed: inst.triples.len() as u128,
            budget: 24,
        });
    }
    let mut by_x: Vec<Vec<(usize, usize)>> = vec![Vec::new(); inst.n];
    for &(x, y, z) in &inst.triples {
        by_x[x].push((y, z));
    }
    fn go(
        x: usize,
        n: usize,
        by_x: &[Vec<(usize, usize)>],
        used_y: &mut [bool],
        used_z: &mut [bool],
    ) -> bool {
        if x == n {
            return true;
        }
        for &(y, z) in &by_x[x] {
            if !used_y[y] && !used_z[z] {
                used_y[y] = true;
                used_z[z] = true;
                if go(x + 1, n, by_x, used_y, used_z) {
                    return true;
                }
                used_y[y] = false;
                used_z[z] = false;
            }
        }
        false
    }
    let mut used_y = vec![false; inst.n];
    let mut used_z = vec![false; inst.n];
    Ok(go(0, inst.n, &by_x, &mut used_y, &mut used_z))
}

/// Returns one perfect matching as triple indices, if any exists.
pub fn find_3dm_matching(inst: &ThreeDMInstance) -> Option<Vec<usize>> {
    let mut by_x: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); inst.n];
    for (idx, &(x, y, z)) in inst.triples.iter().enumerate() {
        by_x[x].push((idx, y, z));
    }
    fn go(
        x: usize,
        n: usize,
        by_x: &[Vec<(usize, usize, usize)>],
        used_y: &mut [bool],
        used_z: &mut [bool],
        acc: &mut Vec<usize>,
    ) -> bool {
        if x == n {
            return true;
        }
        for &(idx, y, z) in &by_x[x] {
            if !used_y[y] && !used_z[z] {
                used_y[y] = true;
                used_z[z] = true;
                acc.push(idx);
                if go(x + 1, n, by_x, used_y, used_z, acc) {
                    return true;
                }
                acc.pop();
                used_y[y] = false;
                used_z[z] = false;
            }
        }
        false
    }
    let mut used_y = vec![false; inst.n];
    let mut used_z = vec![false; inst.n];
    let mut acc = Vec::new();
    go(0, inst.n, &by_x, &mut used_y, &mut used_z, &mut acc).then_some(acc)
}

/// Where each job family of a reduced game lives.
#[derive(Clone, Debug)]
pub struct ReductionLayout {
    pub u: JobId,
    pub v: JobId,
    pub w: JobId,
    pub f: JobId,
    pub d_jobs: Vec<JobId>,
    pub u_dummies: Vec<JobId>,
    pub x_jobs: Vec<JobId>,
    pub y_jobs: Vec<JobId>,
    pub z_jobs: Vec<JobId>,
    /// Machine ids 0, 1, 2 are the three fixed machines; these are the rest.
    pub triplet_machines: Vec<MachineId>,
    pub triples: Vec<(usize, usize, usize)>,
}

/// A reduced game plus its layout.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub game: GameInstance,
    pub layout: ReductionLayout,
}

impl Reduction {
    pub fn job_names(&self) -> Vec<String> {
        let l = &self.layout;
        let mut names = vec![String::new(); self.game.n()];
        names[l.u] = "u".into();
        names[l.v] = "v".into();
        names[l.w] = "w".into();
        names[l.f] = "f".into();
        for (k, &id) in l.d_jobs.iter().enumerate() {
            names[id] = format!("d{}", k + 1);
        }
        for (k, &id) in l.u_dummies.iter().enumerate() {
            names[id] = format!("q{}", k + 1);
        }
        for (k, &id) in l.x_jobs.iter().enumerate() {
            names[id] = format!("x{}", k + 1);
        }
        for (k, &id) in l.y_jobs.iter().enumerate() {
            names[id] = format!("y{}", k + 1);
        }
        for (k, &id) in l.z_jobs.iter().enumerate() {
            names[id] = format!("z{}", k + 1);
        }
        names
    }
}

/// Builds the equilibrium-existence game for a 3DM-3 instance: the no-NE
/// three-job gadget, a pivot job `f` of length exactly 32/7, filler jobs,
/// one oversized dummy per machine, and a unit job per element, wired so a
/// perfect matching frees the gadget and its absence triggers it.
pub fn reduce_3dm(inst: &ThreeDMInstance) -> Result<Reduction> {
    let n = inst.n;
    let t = inst.triples.len();
    let gamma = Numeric::ratio(32, 7); // (5 - 1/5) / (21/20)
    let tau = Numeric::ratio(1, 5);

    let mut jobs: Vec<ProcessingFunction> = Vec::new();
    let u = 0;
    let v = 1;
    let w = 2;
    let f = 3;
    jobs.push(ProcessingFunction::negative(
        Numeric::int(5),
        Numeric::ratio(21, 20),
        tau.clone(),
    )?);
    jobs.push(ProcessingFunction::negative(
        Numeric::int(4),
        Numeric::ratio(11, 10),
        tau.clone(),
    )?);
    jobs.push(ProcessingFunction::negative(
        Numeric::int(3),
        Numeric::ratio(6, 5),
        tau,
    )?);
    jobs.push(ProcessingFunction::fixed(gamma.clone())?);

    let d_jobs: Vec<JobId> = (jobs.len()..jobs.len() + (t - n)).collect();
    for _ in 0..t - n {
        jobs.push(ProcessingFunction::fixed(&gamma + &Numeric::int(1))?);
    }
    let u_dummies: Vec<JobId> = (jobs.len()..jobs.len() + t + 3).collect();
    for _ in 0..t + 3 {
        jobs.push(ProcessingFunction::fixed(&gamma + &Numeric::int(2))?);
    }
    let x_jobs: Vec<JobId> = (jobs.len()..jobs.len() + n).collect();
    for _ in 0..n {
        jobs.push(ProcessingFunction::fixed(Numeric::int(1))?);
    }
    let y_jobs: Vec<JobId> = (jobs.len()..jobs.len() + n).collect();
    for _ in 0..n {
        jobs.push(ProcessingFunction::fixed(Numeric::int(1))?);
    }
    let z_jobs: Vec<JobId> = (jobs.len()..jobs.len() + n).collect();
    for _ in 0..n {
        jobs.push(ProcessingFunction::fixed(Numeric::int(1))?);
    }
    let n_jobs = jobs.len();

    let mut priorities: Vec<Vec<JobId>> = Vec::new();
    // machine 0: (v, u, w, f, U, X, Y, Z, D)
    let mut p0 = vec![v, u, w, f];
    p0.extend(&u_dummies);
    p0.extend(&x_jobs);
    p0.extend(&y_jobs);
    p0.extend(&z_jobs);
    p0.extend(&d_jobs);
    priorities.push(p0);
    // machine 1: (w, u, v, f, U, X, Y, Z, D)
    let mut p1 = vec![w, u, v, f];
    p1.extend(&u_dummies);
    p1.extend(&x_jobs);
    p1.extend(&y_jobs);
    p1.extend(&z_jobs);
    p1.extend(&d_jobs);
    priorities.push(p1);
    // machine 2: (f, X, Y, Z, D, u, v, w, U)
    let mut p2 = vec![f];
    p2.extend(&x_jobs);
    p2.extend(&y_jobs);
    p2.extend(&z_jobs);
    p2.extend(&d_jobs);
    p2.extend([u, v, w]);
    p2.extend(&u_dummies);
    priorities.push(p2);
    // one machine per triple: (D, x, y, z, f, U, X', Y', Z', u, v, w)
    for &(xi, yi, zi) in &inst.triples {
        let mut p = Vec::with_capacity(n_jobs);
        p.extend(&d_jobs);
        p.push(x_jobs[xi]);
        p.push(y_jobs[yi]);
        p.push(z_jobs[zi]);
        p.push(f);
        p.extend(&u_dummies);
        p.extend(x_jobs.iter().filter(|&&j| j != x_jobs[xi]));
        p.extend(y_jobs.iter().filter(|&&j| j != y_jobs[yi]));
        p.extend(z_jobs.iter().filter(|&&j| j != z_jobs[zi]));
        p.extend([u, v, w]);
        priorities.push(p);
    }

    let machines = priorities
        .into_iter()
        .map(|p| Machine::new(Numeric::int(1), p, n_jobs))
        .collect::<Result<Vec<_>>>()?;
    let game = GameInstance::new(jobs, machines, NumericMode::Rational)?;
    let layout = ReductionLayout {
        u,
        v,
        w,
        f,
        d_jobs,
        u_dummies,
        x_jobs,
        y_jobs,
        z_jobs,
        triplet_machines: (3..3 + t).collect(),
        triples: inst.triples.clone(),
    };
    Ok(Reduction { game, layout })
}

/// The stable profile a perfect matching induces: elements on their
/// matched machines, fillers on the rest, one oversized dummy everywhere,
/// `f` and `u` parked on machine 2, `w` and `v` on machines 0 and 1.
pub fn matching_profile(red: &Reduction, matching: &[usize]) -> Profile {
    let l = &red.layout;
    let m = red.game.m();
    let mut assign = vec![usize::MAX; red.game.n()];
    let mut machine_used = vec![false; m];
    for &tri in matching {
        let mach = l.triplet_machines[tri];
        machine_used[mach] = true;
        let (x, y, z) = l.triples[tri];
        assign[l.x_jobs[x]] = mach;
        assign[l.y_jobs[y]] = mach;
        assign[l.z_jobs[z]] = mach;
    }
    let mut free_triplets = l
        .triplet_machines
        .iter()
        .copied()
        .filter(|&mm| !machine_used[mm]);
    for &d in &l.d_jobs {
        assign[d] = free_triplets.next().expect("|D| spare triplet machines");
    }
    assign[l.f] = 2;
    assign[l.u] = 2;
    assign[l.w] = 0;
    assign[l.v] = 1;
    place_dummies_sorted(&red.game, l, &mut assign);
    Profile(assign)
}

/// Assigns the oversized dummies one per machine, ids ascending by the
/// machine's load above the dummy block.
///
/// Dummies are identical in length but ranked by id inside the shared
/// block, so only the id ordering across machines matters for their
/// stability: a dummy behind load `b_A` can undercut machine `B` exactly
/// when it would arrive ahead of `B`'s dummy (`id` smaller) and `b_B < b_A`,
/// or land behind it with `b_B + p < b_A`. Sorting ids by load ascending
/// removes every move of the first kind, and moves of the second kind do
/// not depend on ids at all, so if the sorted assignment is unstable no
/// assignment is.
pub(crate) fn place_dummies_sorted(
    game: &GameInstance,
    l: &ReductionLayout,
    assign: &mut [usize],
) {
    let m = game.m();
    let mut bases: Vec<(Numeric, MachineId)> = Vec::with_capacity(m);
    for j in 0..m {
        let machine = game.machine(j);
        let block = machine.rank_of(l.u_dummies[0]);
        let mut clock = game.mode().zero();
        for &job in machine.priority().iter().take(block) {
            if assign[job] == j {
                let p = game.job(job).eval_unchecked(&clock);
                let done = &clock + &(&p / machine.speed());
                clock = done;
            }
        }
        bases.push((clock, j));
    }
    bases.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    for (k, (_, j)) in bases.into_iter().enumerate() {
        assign[l.u_dummies[k]] = j;
    }
}

struct SearchCtx<'a> {
    red: &'a Reduction,
    /// element job ids in global placement order (X, then Y, then Z)
    elements: Vec<JobId>,
    /// per element, the triplet machines whose triple contains it
    own_machines: Vec<Vec<MachineId>>,
    nodes: u64,
}

const NODE_BUDGET: u64 = 50_000_000;

/// Decides equilibrium existence for a reduced game by structure-aware
/// search: `f` pinned first on machine 2, filler jobs on distinct triplet
/// machines, one oversized dummy per machine, and elements placed with
/// sound local-stability pruning. Deviations whose target cost is already
/// final (machine 2 and the element's own triplet machines) kill a branch
/// as soon as they strictly improve.
pub fn reduced_ne_exists(red: &Reduction) -> Result<bool> {
    let l = &red.layout;
    let mut elements: Vec<JobId> = Vec::new();
    elements.extend(&l.x_jobs);
    elements.extend(&l.y_jobs);
    elements.extend(&l.z_jobs);
    let mut own_machines = vec![Vec::new(); elements.len()];
    let elem_pos: std::collections::HashMap<JobId, usize> = elements
        .iter()
        .enumerate()
        .map(|(k, &id)| (id, k))
        .collect();
    for (tri, &(x, y, z)) in l.triples.iter().enumerate() {
        let mach = l.triplet_machines[tri];
        own_machines[elem_pos[&l.x_jobs[x]]].push(mach);
        own_machines[elem_pos[&l.y_jobs[y]]].push(mach);
        own_machines[elem_pos[&l.z_jobs[z]]].push(mach);
    }
    let mut ctx = SearchCtx { red, elements, own_machines, nodes: 0 };

    let d_count = l.d_jobs.len();
    let tm = l.triplet_machines.clone();
    let mut chosen: Vec<MachineId> = Vec::new();
    search_d_subsets(&mut ctx, &tm, d_count, 0, &mut chosen)
}

fn search_d_subsets(
    ctx: &mut SearchCtx,
    tm: &[MachineId],
    remaining: usize,
    from: usize,
    chosen: &mut Vec<MachineId>,
) -> Result<bool> {
    if remaining == 0 {
        return search_elements(ctx, chosen);
    }
    for i in from..=tm.len() - remaining {
        chosen.push(tm[i]);
        if search_d_subsets(ctx, tm, remaining - 1, i + 1, chosen)? {
            return Ok(true);
        }
        chosen.pop();
    }
    Ok(false)
}

/// Loads per machine of everything placed so far, ordered by priority rank.
#[derive(Clone)]
struct PartialState {
    /// per machine: (rank, completion) of placed jobs, rank-ascending
    placed: Vec<Vec<(usize, Numeric)>>,
}

impl PartialState {
    /// Completion a job would get if appended at its rank on `mach`,
    /// counting only already-placed (higher-priority) jobs there.
    fn insertion_cost(
        &self,
        game: &GameInstance,
        mach: MachineId,
        job: JobId,
    ) -> Numeric {
        let rank = game.machine(mach).rank_of(job);
        let start = self.placed[mach]
            .iter()
            .rev()
            .find(|(r, _)| *r < rank)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(|| game.mode().zero());
        let p = game.job(job).eval_unchecked(&start);
        &start + &(&p / game.machine(mach).speed())
    }

    fn place(&mut self, game: &GameInstance, mach: MachineId, job: JobId) -> Numeric {
        let cost = self.insertion_cost(game, mach, job);
        let rank = game.machine(mach).rank_of(job);
        let pos = self.placed[mach]
            .binary_search_by(|(r, _)| r.cmp(&rank))
            .unwrap_err();
        self.placed[mach].insert(pos, (rank, cost.clone()));
        cost
    }

    fn unplace(&mut self, game: &GameInstance, mach: MachineId, job: JobId) {
        let rank = game.machine(mach).rank_of(job);
        let pos = self.placed[mach]
            .binary_search_by(|(r, _)| r.cmp(&rank))
            .expect("job was placed");
        self.placed[mach].remove(pos);
    }
}

fn search_elements(ctx: &mut SearchCtx, d_machines: &[MachineId]) -> Result<bool> {
    let game = ctx.red.game.clone();
    let l = ctx.red.layout.clone();
    let m = game.m();
    let mut state = PartialState { placed: vec![Vec::new(); m] };
    let mut assign = vec![usize::MAX; game.n()];

    assign[l.f] = 2;
    state.place(&game, 2, l.f);
    for (i, &d) in l.d_jobs.iter().enumerate() {
        assign[d] = d_machines[i];
        state.place(&game, d_machines[i], d);
    }

    let elements = ctx.elements.clone();
    let own = ctx.own_machines.clone();
    place_element(ctx, &game, &l, &elements, &own, 0, &mut state, &mut assign)
}

#[allow(clippy::too_many_arguments)]
fn place_element(
    ctx: &mut SearchCtx,
    game: &GameInstance,
    l: &ReductionLayout,
    elements: &[JobId],
    own: &[Vec<MachineId>],
    idx: usize,
    state: &mut PartialState,
    assign: &mut Vec<usize>,
) -> Result<bool> {
    ctx.nodes += 1;
    if ctx.nodes > NODE_BUDGET {
        return Err(GameError::BudgetExceeded {
            needed: ctx.nodes as u128,
            budget: NODE_BUDGET as u128,
        });
    }
    if idx == elements.len() {
        return try_gadget_placements(ctx, game, l, state, assign);
    }
    let job = elements[idx];
    // candidate machines: own triples and machine 2 first, the rest after
    let mut domain: Vec<MachineId> = own[idx].clone();
    domain.push(2);
    domain.push(0);
    domain.push(1);
    for &t in &l.triplet_machines {
        if !own[idx].contains(&t) {
            domain.push(t);
        }
    }
    let dummy_len = game.job(l.u_dummies[0]).basic().clone();
    for mach in domain {
        // cost of the element here, counting jobs placed so far; exact for
        // machine 2 and own-triple machines, a lower bound elsewhere. Where
        // the machine's dummy block outranks the element, the machine's
        // future dummy adds its full length to the bound.
        let mut cost_lb = state.insertion_cost(game, mach, job);
        let machine = game.machine(mach);
        if machine.rank_of(l.u_dummies[0]) < machine.rank_of(job) {
            cost_lb = &cost_lb + &dummy_len;
        }
        // final-cost deviation targets: strictly better one => never stable
        let escape = own[idx]
            .iter()
            .copied()
            .chain([2])
            .filter(|&t| t != mach)
            .any(|t| {
                state
                    .insertion_cost(game, t, job)
                    .total_cmp(&cost_lb)
                    == Ordering::Less
            });
        if escape {
            continue;
        }
        assign[job] = mach;
        state.place(game, mach, job);
        let found =
            place_element(ctx, game, l, elements, own, idx + 1, state, assign)?;
        state.unplace(game, mach, job);
        assign[job] = usize::MAX;
        if found {
            return Ok(true);
        }
    }
    Ok(false)
}

fn try_gadget_placements(
    ctx: &mut SearchCtx,
    game: &GameInstance,
    l: &ReductionLayout,
    _state: &PartialState,
    assign: &mut Vec<usize>,
) -> Result<bool> {
    let m = game.m();
    // try machine 2 first for u, the gadget homes first for v and w
    let mut order_u: Vec<MachineId> = vec![2, 0, 1];
    order_u.extend(3..m);
    let mut order_v: Vec<MachineId> = vec![1, 0, 2];
    order_v.extend(3..m);
    let mut order_w: Vec<MachineId> = vec![0, 1, 2];
    order_w.extend(3..m);
    for &mu in &order_u {
        for &mv in &order_v {
            for &mw in &order_w {
                ctx.nodes += 1;
                if ctx.nodes > NODE_BUDGET {
                    return Err(GameError::BudgetExceeded {
                        needed: ctx.nodes as u128,
                        budget: NODE_BUDGET as u128,
                    });
                }
                assign[l.u] = mu;
                assign[l.v] = mv;
                assign[l.w] = mw;
                place_dummies_sorted(game, l, assign);
                let profile = Profile(assign.clone());
                let sched = build_schedule(game, &profile);
                if is_nash_cached(game, &sched, &profile).0 {
                    return Ok(true);
                }
            }
        }
    }
    assign[l.u] = usize::MAX;
    assign[l.v] = usize::MAX;
    assign[l.w] = usize::MAX;
    for &q in &l.u_dummies {
        assign[q] = usize::MAX;
    }
    Ok(false)
}
