//! Operational semantics.
//!
//! A closed process is kept as a flat configuration: a set of restricted
//! names and a list of threads, each headed by something other than a
//! composition. Reduction picks one redex at a time; the choice is made by a
//! seeded PRNG so that runs are reproducible.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::equality::{nf_term, whnf_sess, whnf_sess_default, Fuel, Fueled};
use crate::subst::{rename_simultaneous, Substitutable};
use crate::syntax::*;

/// One step of closed-term evaluation, leftmost-outermost.
pub fn step_term(m: &Term) -> Option<Term> {
    match m {
        Term::App(f, a) => match &**f {
            Term::Lam(x, _, b) => Some(b.subst_term(x, a)),
            f => Some(app(step_term(f)?, (**a).clone())),
        },
        Term::IfT(c, a, b) => match &**c {
            Term::TT => Some((**a).clone()),
            Term::FF => Some((**b).clone()),
            c => Some(Term::IfT(Box::new(step_term(c)?), a.clone(), b.clone())),
        },
        Term::NatRecT {
            motive,
            target,
            zero,
            pred,
            rec,
            succ,
        } => match &**target {
            Term::Zero => Some((**zero).clone()),
            Term::Succ(k) => {
                let again = Term::NatRecT {
                    motive: motive.clone(),
                    target: k.clone(),
                    zero: zero.clone(),
                    pred: pred.clone(),
                    rec: rec.clone(),
                    succ: succ.clone(),
                };
                let mut avoid = succ.free_names();
                avoid.extend(again.free_names());
                avoid.extend(k.free_names());
                avoid.insert(pred.clone());
                let r2 = fresh_name(rec, &avoid);
                Some(
                    succ.rename(rec, &r2)
                        .subst_term(pred, k)
                        .subst_term(&r2, &again),
                )
            }
            t => Some(Term::NatRecT {
                motive: motive.clone(),
                target: Box::new(step_term(t)?),
                zero: zero.clone(),
                pred: pred.clone(),
                rec: rec.clone(),
                succ: succ.clone(),
            }),
        },
        Term::Succ(a) => Some(succ(step_term(a)?)),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Event {
    ValueComm {
        channel: Name,
        payload: String,
    },
    FreshComm {
        channel: Name,
        fresh: Name,
    },
    Choice {
        channel: Name,
        label: Label,
    },
    ReplSpawn {
        channel: Name,
        fresh: Name,
    },
    /// `from` disappears in favour of `to`.
    FwdRename {
        from: Name,
        to: Name,
    },
    MonadSpawn {
        fresh: Name,
    },
    TermStep {
        thread: usize,
    },
}

impl std::fmt::Display for Event {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Event::ValueComm { channel, payload } => write!(f, "ValueComm {channel} {payload}"),
            Event::FreshComm { channel, fresh } => write!(f, "FreshComm {channel} {fresh}"),
            Event::Choice { channel, label } => write!(f, "Choice {channel} {label}"),
            Event::ReplSpawn { channel, fresh } => write!(f, "ReplSpawn {channel} {fresh}"),
            Event::FwdRename { from, to } => write!(f, "FwdRename {from} {to}"),
            Event::MonadSpawn { fresh } => write!(f, "MonadSpawn {fresh}"),
            Event::TermStep { thread } => write!(f, "TermStep #{thread}"),
        }
    }
}

impl std::fmt::Display for TraceEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "STEP {}: {}", self.step, self.event)
    }
}

#[derive(Clone, Debug)]
pub struct Thread {
    pub proc: Process,
    /// The channel this thread provides, when known.
    pub offers: Option<Name>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Redex {
    Pair { sender: usize, receiver: usize },
    Forward(usize),
    Spawn(usize),
    TermStep(usize),
}

#[derive(Clone, Debug, Default)]
pub struct Config {
    pub threads: Vec<Thread>,
    pub restricted: BTreeSet<Name>,
    /// Current session types of restricted channels, when known.
    pub types: BTreeMap<Name, SessType>,
    pub root: Option<Name>,
    avoid: BTreeSet<Name>,
}

fn senderish(p: &Process) -> Option<&Name> {
    match p {
        Process::OutTerm { on, .. }
        | Process::OutFresh { on, .. }
        | Process::Select { on, .. }
        | Process::Copy { on, .. } => Some(on),
        _ => None,
    }
}

fn receiverish(p: &Process) -> Option<&Name> {
    match p {
        Process::In { on, .. } | Process::Case { on, .. } | Process::Repl { on, .. } => Some(on),
        _ => None,
    }
}

impl Config {
    pub fn flatten(p: &Process, root: Option<Name>) -> Config {
        let mut cfg = Config {
            root: root.clone(),
            avoid: all_names(p),
            ..Default::default()
        };
        cfg.avoid.extend(root.clone());
        cfg.push(p.clone(), root);
        cfg
    }

    fn fresh(&mut self, base: &str) -> Name {
        for t in &self.threads {
            self.avoid.extend(all_names(&t.proc));
        }
        let n = fresh_name(base, &self.avoid);
        self.avoid.insert(n.clone());
        n
    }

    /// Adds a process as new threads, opening compositions and dropping
    /// inaction.
    fn push(&mut self, p: Process, offers: Option<Name>) {
        match p {
            Process::Nil => {}
            Process::New {
                bind,
                anno,
                left,
                right,
            } => {
                let taken = self.restricted.contains(&bind)
                    || self.root.as_ref() == Some(&bind)
                    || self.threads.iter().any(|t| t.proc.mentions(&bind));
                let (x, left, right) = if taken {
                    let x = self.fresh(&bind);
                    (x.clone(), left.rename(&bind, &x), right.rename(&bind, &x))
                } else {
                    (bind, *left, *right)
                };
                self.restricted.insert(x.clone());
                if let Some(a) = anno {
                    self.types.insert(x.clone(), a);
                }
                self.push(left, Some(x));
                self.push(right, offers);
            }
            Process::If { cond, then, other } => {
                let mut fuel = Fuel::default();
                match nf_term(&cond, &mut fuel) {
                    Ok(Term::TT) => self.push(*then, offers),
                    Ok(Term::FF) => self.push(*other, offers),
                    _ => self.threads.push(Thread {
                        proc: Process::If { cond, then, other },
                        offers,
                    }),
                }
            }
            p => self.threads.push(Thread { proc: p, offers }),
        }
    }

    /// Replaces thread `i` by `p`, keeping its role.
    fn replace(&mut self, i: usize, p: Process) {
        let t = self.threads.remove(i);
        let start = self.threads.len();
        self.push(p, t.offers);
        let added: Vec<Thread> = self.threads.drain(start..).collect();
        self.threads.splice(i..i, added);
    }

    pub fn redexes(&self) -> Vec<Redex> {
        let mut out = vec![];
        for (i, t) in self.threads.iter().enumerate() {
            match &t.proc {
                Process::Fwd { from, to }
                    if from != to
                        && (self.restricted.contains(from) || self.restricted.contains(to)) =>
                {
                    out.push(Redex::Forward(i))
                }
                Process::Spawn(s) => {
                    if matches!(s.term, Term::MonadVal(_)) {
                        out.push(Redex::Spawn(i));
                    } else if step_term(&s.term).is_some() {
                        out.push(Redex::TermStep(i));
                    }
                }
                p => {
                    if let Some(c) = senderish(p).filter(|c| self.restricted.contains(*c)) {
                        for (j, u) in self.threads.iter().enumerate() {
                            if j != i && receiverish(&u.proc) == Some(c) && compatible(p, &u.proc) {
                                out.push(Redex::Pair {
                                    sender: i,
                                    receiver: j,
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }

    fn retype(&mut self, c: &Name, f: impl FnOnce(SessType) -> Option<SessType>) {
        if let Some(a) = self.types.remove(c) {
            if let Ok(a) = whnf_sess(&a, &mut Fuel::default()) {
                if let Some(b) = f(a) {
                    self.types.insert(c.clone(), b);
                }
            }
        }
    }

    pub fn fire(&mut self, r: Redex) -> Event {
        match r {
            Redex::Pair { sender, receiver } => self.communicate(sender, receiver),
            Redex::Forward(i) => {
                let Process::Fwd { from, to } = self.threads[i].proc.clone() else {
                    unreachable!()
                };
                let (removed, kept) = if self.restricted.contains(&from) {
                    (from, to)
                } else {
                    (to, from)
                };
                self.threads.remove(i);
                for t in self.threads.iter_mut() {
                    t.proc = t.proc.rename(&removed, &kept);
                    if t.offers.as_ref() == Some(&removed) {
                        t.offers = Some(kept.clone());
                    }
                }
                self.restricted.remove(&removed);
                if let Some(a) = self.types.remove(&removed) {
                    self.types.entry(kept.clone()).or_insert(a);
                }
                Event::FwdRename {
                    from: removed,
                    to: kept,
                }
            }
            Redex::Spawn(i) => {
                let Process::Spawn(s) = self.threads[i].proc.clone() else {
                    unreachable!()
                };
                let Term::MonadVal(mv) = &s.term else {
                    unreachable!()
                };
                let x = self.fresh(&s.bind);
                let mut pairs = vec![(mv.offered.clone(), x.clone())];
                pairs.extend(mv.shared.iter().cloned().zip(s.shared.iter().cloned()));
                pairs.extend(mv.linear.iter().cloned().zip(s.linear.iter().cloned()));
                let body = rename_simultaneous(&mv.body, &pairs);
                let cont = s.cont.rename(&s.bind, &x);
                self.restricted.insert(x.clone());
                if let Some(a) = &s.anno {
                    self.types.insert(x.clone(), a.clone());
                }
                self.replace(i, cont);
                self.push(body, Some(x.clone()));
                Event::MonadSpawn { fresh: x }
            }
            Redex::TermStep(i) => {
                let Process::Spawn(mut s) = self.threads[i].proc.clone() else {
                    unreachable!()
                };
                s.term = step_term(&s.term).expect("redex");
                self.threads[i].proc = Process::Spawn(s);
                Event::TermStep { thread: i }
            }
        }
    }

    fn communicate(&mut self, i: usize, j: usize) -> Event {
        use Process::*;
        let (p, q) = (self.threads[i].proc.clone(), self.threads[j].proc.clone());
        // apply the receiver first so that indices stay valid: replace the
        // larger index first
        let mut updates: Vec<(usize, Process)> = vec![];
        let mut spawned: Option<(Process, Name)> = None;
        let ev = match (p, q) {
            (
                OutTerm {
                    on, payload, body, ..
                },
                In { bind, body: k, .. },
            ) => {
                updates.push((i, *body));
                updates.push((j, k.subst_term(&bind, &payload)));
                let m = payload.clone();
                self.retype(&on, |a| match a {
                    SessType::Exists(x, _, b) | SessType::Forall(x, _, b) => {
                        Some(b.subst_term(&x, &m))
                    }
                    _ => None,
                });
                Event::ValueComm {
                    channel: on,
                    payload: payload.to_string(),
                }
            }
            (
                OutFresh {
                    on,
                    bind,
                    left,
                    right,
                },
                In {
                    bind: y, body: k, ..
                },
            ) => {
                let w = self.fresh(&bind);
                updates.push((i, right.rename(&bind, &w)));
                updates.push((j, k.rename(&y, &w)));
                spawned = Some((left.rename(&bind, &w), w.clone()));
                self.restricted.insert(w.clone());
                let mut first = None;
                self.retype(&on, |a| match a {
                    SessType::Tensor(x, y) | SessType::Lolli(x, y) => {
                        first = Some(*x);
                        Some(*y)
                    }
                    _ => None,
                });
                if let Some(a) = first {
                    self.types.insert(w.clone(), a);
                }
                Event::FreshComm {
                    channel: on,
                    fresh: w,
                }
            }
            (Select { on, label, body }, Case { branches, .. }) => {
                updates.push((i, *body));
                updates.push((j, branches[&label].clone()));
                let l = label.clone();
                self.retype(&on, |a| match a {
                    SessType::With(mut bs) | SessType::Plus(mut bs) => bs.remove(&l),
                    _ => None,
                });
                Event::Choice { channel: on, label }
            }
            (
                Copy { on, bind, body },
                Repl {
                    bind: x,
                    body: server,
                    ..
                },
            ) => {
                let y = self.fresh(&bind);
                updates.push((i, body.rename(&bind, &y)));
                spawned = Some((server.rename(&x, &y), y.clone()));
                self.restricted.insert(y.clone());
                if let Some(a) = self.types.get(&on).cloned() {
                    if let Ok(SessType::Bang(a)) = whnf_sess(&a, &mut Fuel::default()) {
                        self.types.insert(y.clone(), *a);
                    }
                }
                Event::ReplSpawn {
                    channel: on,
                    fresh: y,
                }
            }
            _ => unreachable!("not a redex"),
        };
        updates.sort_by(|a, b| b.0.cmp(&a.0));
        for (k, p) in updates {
            self.replace(k, p);
        }
        if let Some((p, w)) = spawned {
            self.push(p, Some(w));
        }
        ev
    }

    /// Reduces with a deterministic choice until no redex is left.
    pub fn quiesce(&mut self, fuel: &mut Fuel) -> Fueled<()> {
        while let Some(r) = self.redexes().first().copied() {
            fuel.tick()?;
            self.fire(r);
        }
        Ok(())
    }

    /// Threads that still want to act on a private channel.
    pub fn live_blocked(&self) -> Vec<usize> {
        self.threads
            .iter()
            .enumerate()
            .filter(|(_, t)| match &t.proc {
                Process::Repl { .. } | Process::Nil => false,
                Process::Spawn(_) => true,
                Process::Fwd { from, to } => {
                    self.restricted.contains(from) || self.restricted.contains(to)
                }
                p => senderish(p)
                    .or(receiverish(p))
                    .is_some_and(|c| self.restricted.contains(c)),
            })
            .map(|(i, _)| i)
            .collect()
    }

    /// Reassembles a process from the configuration. Linear providers are
    /// composed under the thread that uses them; providers of shared
    /// channels (servers, or anything used more than once) go outermost,
    /// each outside everything that uses it.
    pub fn rebuild(&self) -> Process {
        let n = self.threads.len();
        let offered = |i: usize| {
            self.threads[i]
                .offers
                .as_ref()
                .filter(|o| self.restricted.contains(*o))
        };
        let users = |o: &Name, i: usize| {
            (0..n)
                .filter(|&j| j != i && self.threads[j].proc.mentions(o))
                .count()
        };
        let shared: Vec<bool> = (0..n)
            .map(|i| match offered(i) {
                Some(o) => {
                    matches!(&self.threads[i].proc, Process::Repl { on, .. } if on == o)
                        || matches!(
                            self.types.get(o).map(whnf_sess_default),
                            Some(SessType::Bang(_))
                        )
                        || users(o, i) >= 2
                }
                None => false,
            })
            .collect();
        let provider: BTreeMap<&Name, usize> =
            (0..n).filter_map(|i| offered(i).map(|o| (o, i))).collect();
        let is_shared = |i: usize| shared[i];
        let mut placed = vec![false; n];
        let mut bound: BTreeSet<Name> = BTreeSet::new();

        // tops of the linear trees: roots, then providers nobody uses
        let mut order: Vec<usize> = (0..n).filter(|&i| offered(i).is_none()).collect();
        order
            .extend((0..n).filter(|&i| !shared[i] && offered(i).is_some_and(|o| users(o, i) == 0)));
        let mut acc: Option<Process> = None;
        for i in order {
            if placed[i] {
                continue;
            }
            let p = self.build_for(i, &provider, &is_shared, &mut placed, &mut bound);
            acc = Some(match (acc, offered(i)) {
                (q, Some(o)) if !bound.contains(o) => {
                    bound.insert(o.clone());
                    Process::New {
                        bind: o.clone(),
                        anno: self.types.get(o).cloned(),
                        left: Box::new(p),
                        right: Box::new(q.unwrap_or(Process::Nil)),
                    }
                }
                (None, _) => p,
                (Some(q), _) => self.dummy_par(q, p),
            });
        }
        let mut out = acc.unwrap_or(Process::Nil);

        // shared providers with their linear subtrees, innermost first
        let mut servers: Vec<(Name, Process)> = vec![];
        let pending: Vec<usize> = (0..n).filter(|&i| shared[i] && !placed[i]).collect();
        for i in pending {
            let u = offered(i).unwrap().clone();
            let body = self.build_for(i, &provider, &is_shared, &mut placed, &mut bound);
            servers.push((u, body));
        }
        // anything left is a provider whose user never got placed
        for i in 0..n {
            if !placed[i] {
                let p = self.build_for(i, &provider, &is_shared, &mut placed, &mut bound);
                out = match offered(i) {
                    Some(o) if !bound.contains(o) => {
                        bound.insert(o.clone());
                        Process::New {
                            bind: o.clone(),
                            anno: self.types.get(o).cloned(),
                            left: Box::new(p),
                            right: Box::new(out),
                        }
                    }
                    _ => self.dummy_par(out, p),
                };
            }
        }
        while !servers.is_empty() {
            let pos = (0..servers.len())
                .find(|&s| {
                    !servers
                        .iter()
                        .enumerate()
                        .any(|(t, (_, b))| t != s && b.mentions(&servers[s].0))
                })
                .unwrap_or(0);
            let (u, body) = servers.remove(pos);
            bound.insert(u.clone());
            out = Process::New {
                bind: u.clone(),
                anno: self.types.get(&u).cloned(),
                left: Box::new(body),
                right: Box::new(out),
            };
        }
        for x in &self.restricted {
            if !bound.contains(x) && out.mentions(x) {
                out = Process::New {
                    bind: x.clone(),
                    anno: self.types.get(x).cloned(),
                    left: Box::new(Process::Nil),
                    right: Box::new(out),
                };
            }
        }
        out
    }

    fn dummy_par(&self, left: Process, right: Process) -> Process {
        let mut avoid = all_names(&left);
        avoid.extend(all_names(&right));
        avoid.extend(self.restricted.iter().cloned());
        Process::New {
            bind: fresh_name("_par", &avoid),
            anno: Some(SessType::One),
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    fn build_for(
        &self,
        i: usize,
        provider: &BTreeMap<&Name, usize>,
        is_server: &dyn Fn(usize) -> bool,
        placed: &mut Vec<bool>,
        bound: &mut BTreeSet<Name>,
    ) -> Process {
        placed[i] = true;
        let mut p = self.threads[i].proc.clone();
        let uses: Vec<Name> = p
            .free_names()
            .into_iter()
            .filter(|y| self.restricted.contains(y) && self.threads[i].offers.as_ref() != Some(y))
            .collect();
        for y in uses {
            if let Some(&j) = provider.get(&y) {
                if !placed[j] && !is_server(j) {
                    let q = self.build_for(j, provider, is_server, placed, bound);
                    bound.insert(y.clone());
                    p = Process::New {
                        bind: y.clone(),
                        anno: self.types.get(&y).cloned(),
                        left: Box::new(q),
                        right: Box::new(p),
                    };
                }
            }
        }
        p
    }

    /// The subconfiguration made of `others` plus `p` in the role of thread
    /// `i`, reassembled.
    pub fn group_with(&self, i: usize, p: Process, others: &[usize]) -> Process {
        let mut threads: Vec<Thread> = others.iter().map(|&j| self.threads[j].clone()).collect();
        threads.push(Thread {
            proc: p,
            offers: self.threads[i].offers.clone(),
        });
        let mentioned: BTreeSet<Name> = threads
            .iter()
            .flat_map(|t| t.proc.free_names().into_iter().chain(t.offers.clone()))
            .filter(|n| self.restricted.contains(n))
            .collect();
        let mut sub = Config {
            threads: vec![],
            restricted: mentioned,
            types: self.types.clone(),
            root: self.root.clone(),
            avoid: self.avoid.clone(),
        };
        for t in threads {
            sub.push(t.proc, t.offers);
        }
        sub.rebuild()
    }

    /// Splits `others` between the two components of a hoisted fresh output,
    /// following private-name connectivity.
    pub fn split_for(
        &self,
        others: &[usize],
        left: &Process,
        right: &Process,
    ) -> Option<(Vec<usize>, Vec<usize>)> {
        let names_of = |j: usize| -> BTreeSet<Name> {
            let t = &self.threads[j];
            t.proc
                .free_names()
                .into_iter()
                .chain(t.offers.clone())
                .filter(|n| self.restricted.contains(n))
                .collect()
        };
        let mut clusters: Vec<(Vec<usize>, BTreeSet<Name>)> = vec![];
        for &j in others {
            let mut ns = names_of(j);
            let mut members = vec![j];
            let mut k = 0;
            while k < clusters.len() {
                if !clusters[k].1.is_disjoint(&ns) {
                    let (m, n) = clusters.remove(k);
                    members.extend(m);
                    ns.extend(n);
                    k = 0;
                } else {
                    k += 1;
                }
            }
            clusters.push((members, ns));
        }
        let (fl, fr) = (left.free_names(), right.free_names());
        let (mut l, mut r) = (vec![], vec![]);
        for (members, ns) in clusters {
            match (!ns.is_disjoint(&fl), !ns.is_disjoint(&fr)) {
                (true, true) => return None,
                (true, false) => l.extend(members),
                _ => r.extend(members),
            }
        }
        l.sort();
        r.sort();
        Some((l, r))
    }
}

fn compatible(p: &Process, q: &Process) -> bool {
    use Process::*;
    match (p, q) {
        (OutTerm { .. }, In { .. }) | (OutFresh { .. }, In { .. }) | (Copy { .. }, Repl { .. }) => {
            true
        }
        (Select { label, .. }, Case { branches, .. }) => branches.contains_key(label),
        _ => false,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceEntry {
    pub step: usize,
    #[serde(flatten)]
    pub event: Event,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Outcome {
    Quiescent,
    StepLimit,
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub trace: Vec<TraceEntry>,
    pub outcome: Outcome,
    pub config: Config,
}

impl RunResult {
    pub fn final_process(&self) -> Process {
        self.config.rebuild()
    }

    /// Threads left waiting on private channels after quiescence.
    pub fn stuck(&self) -> Vec<usize> {
        if self.outcome == Outcome::Quiescent {
            self.config.live_blocked()
        } else {
            vec![]
        }
    }
}

/// Runs `p` (offering `root`) with a seeded scheduler for at most
/// `max_steps` steps.
pub fn run(p: &Process, root: &Name, seed: u64, max_steps: usize) -> RunResult {
    let mut cfg = Config::flatten(p, Some(root.clone()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trace = vec![];
    let outcome = loop {
        let rs = cfg.redexes();
        if rs.is_empty() {
            break Outcome::Quiescent;
        }
        if trace.len() >= max_steps {
            break Outcome::StepLimit;
        }
        let r = rs[rng.gen_range(0..rs.len())];
        let event = cfg.fire(r);
        trace.push(TraceEntry {
            step: trace.len() + 1,
            event,
        });
    };
    RunResult {
        trace,
        outcome,
        config: cfg,
    }
}

/// Runs `p` and calls `each` on the configuration after every step; used by
/// the preservation checks.
pub fn run_observed(
    p: &Process,
    root: &Name,
    seed: u64,
    max_steps: usize,
    mut each: impl FnMut(&Config, &Event),
) -> RunResult {
    let mut cfg = Config::flatten(p, Some(root.clone()));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trace = vec![];
    let outcome = loop {
        let rs = cfg.redexes();
        if rs.is_empty() {
            break Outcome::Quiescent;
        }
        if trace.len() >= max_steps {
            break Outcome::StepLimit;
        }
        let r = rs[rng.gen_range(0..rs.len())];
        let event = cfg.fire(r);
        each(&cfg, &event);
        trace.push(TraceEntry {
            step: trace.len() + 1,
            event,
        });
    };
    RunResult {
        trace,
        outcome,
        config: cfg,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{parse_proc, parse_term};

    #[test]
    fn term_steps() {
        let mut m = parse_term("(\\x:Nat. succ x) (ifT tt 1 2)").unwrap();
        let mut n = 0;
        while let Some(k) = step_term(&m) {
            m = k;
            n += 1;
        }
        assert_eq!(m.as_nat(), Some(2));
        assert!(n >= 2);
    }

    #[test]
    fn value_communication() {
        let p = parse_proc(
            "nu x:(exists n:Nat. 1). (send x <3 : exists n:Nat. 1>. end || recv x (k). end)",
        )
        .unwrap();
        let r = run(&p, &"c".into(), 1, 100);
        assert_eq!(r.outcome, Outcome::Quiescent);
        assert_eq!(r.trace.len(), 1);
        assert_eq!(
            r.trace[0].event,
            Event::ValueComm {
                channel: "x".into(),
                payload: "3".into()
            }
        );
        assert!(r.stuck().is_empty());
        assert_eq!(r.final_process(), Process::Nil);
    }

    #[test]
    fn forwarding_and_choice() {
        let p = parse_proc("nu x:+{a: 1, b: 1}. (x.b; end || nu y:+{a: 1, b: 1}. (fwd x y || case y { a => end, b => end }))").unwrap();
        let r = run(&p, &"c".into(), 7, 100);
        assert_eq!(r.outcome, Outcome::Quiescent);
        assert!(r
            .trace
            .iter()
            .any(|e| matches!(e.event, Event::Choice { ref label, .. } if label == "b")));
        assert!(r
            .trace
            .iter()
            .any(|e| matches!(e.event, Event::FwdRename { .. })));
    }

    #[test]
    fn replication() {
        let p = parse_proc("nu u:!1. (serve u (x). end || copy u (a). copy u (b). end)").unwrap();
        let r = run(&p, &"c".into(), 3, 100);
        let spawns = r
            .trace
            .iter()
            .filter(|e| matches!(e.event, Event::ReplSpawn { .. }))
            .count();
        assert_eq!(spawns, 2);
        assert!(r.stuck().is_empty());
    }

    #[test]
    fn blocked_threads_are_reported() {
        let p = parse_proc("nu x:(exists n:Nat. 1). (recv x (k). end || recv x (j). end)").unwrap();
        let r = run(&p, &"c".into(), 0, 10);
        assert_eq!(r.stuck().len(), 2);
    }

    #[test]
    fn monadic_spawn() {
        let p =
            parse_proc("x <- { d <- send d <1 : exists n:Nat. 1>. end }; recv x (k). end").unwrap();
        let r = run(&p, &"c".into(), 0, 10);
        let kinds: Vec<_> = r.trace.iter().map(|e| e.event.clone()).collect();
        assert!(matches!(kinds[0], Event::MonadSpawn { .. }));
        assert!(matches!(kinds[1], Event::ValueComm { .. }));
    }
}
