//! One function per subcommand; each returns the record to print.

use std::cell::RefCell;
use std::path::PathBuf;

use serde_json::{json, Value};
use wittgr::adlv::{self, BSpec, Mode, SigmaClass};
use wittgr::cache::{self, CountsCache, KlCache, COUNTS_FILE, KL_FILE};
use wittgr::counts::{fit_over_q, CountQuery};
use wittgr::lattice::Window;
use wittgr::weyl::affine::verify_minus_q;
use wittgr::weyl::kl::KlTable;
use wittgr::weyl::lv::LvTable;
use wittgr::weyl::{CoxeterGroup, Twist};
use wittgr::witt::{verify_famous_identity, WittVector};
use wittgr::{gl2, satake, Coweight, Error, GaloisRing, Result, RingKind};

use crate::config::RunConfig;
use crate::output::{Record, Table};
use crate::{AdlvCmd, BArgs, Command, CountCmd, CountOpts, GroupArgs, KlCmd, LvCmd, VerifyCmd, WindowArgs, WittCmd};

pub fn run(cmd: &Command, cfg: &RunConfig) -> Result<Record> {
    match cmd {
        Command::Witt(c) => witt(c, cfg),
        Command::Count(c) => count(c, cfg),
        Command::Kl(KlCmd::Compute { group, w, y }) => kl(group, w, y.as_deref(), cfg),
        Command::Lv(LvCmd::Compute { group, w, y, twist }) => lv(group, w, y.as_deref(), twist, cfg),
        Command::Verify(c) => verify(c, cfg),
        Command::Adlv(c) => adlv_cmd(c, cfg),
    }
}

fn coweight(s: &str) -> Result<Coweight> {
    s.parse()
}

fn coweights(s: &str) -> Result<Vec<Coweight>> {
    let v: Vec<Coweight> = s.split(';').map(coweight).collect::<Result<_>>()?;
    if v.is_empty() || v.iter().any(|c| c.rank() != v[0].rank() || c.rank() == 0) {
        return Err(Error::InvalidArgument(format!("'{s}' is not a list of coweights of one rank")));
    }
    Ok(v)
}

fn codes(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(|x| x.trim().parse::<u32>().map_err(|_| Error::InvalidArgument(format!("bad coordinate '{x}'"))))
        .collect()
}

fn warn(msg: Option<String>) {
    if let Some(m) = msg {
        eprintln!("warning: {m}");
    }
}

fn cache_path(cfg: &RunConfig, file: &str) -> Option<PathBuf> {
    cfg.cache_dir.as_ref().map(|d| d.join(file))
}

fn witt(cmd: &WittCmd, cfg: &RunConfig) -> Result<Record> {
    match cmd {
        WittCmd::Eval(a) => {
            let ring = GaloisRing::new(a.p, a.r, a.h)?;
            let mut rec = Record::new("witt eval", serde_json::to_value(a).expect("serializable"), cfg.seed);
            let x = if a.op == "teichmuller" {
                let c = codes(&a.a)?;
                if c.len() != 1 {
                    return Err(Error::InvalidArgument("teichmuller takes one field element".into()));
                }
                WittVector::teichmuller(&ring, c[0])
            } else {
                WittVector::from_coords(&ring, &codes(&a.a)?)?
            };
            let other = || -> Result<WittVector> {
                let b = a.b.as_deref().ok_or_else(|| Error::InvalidArgument(format!("{} needs --b", a.op)))?;
                WittVector::from_coords(&ring, &codes(b)?)
            };
            let out = match a.op.as_str() {
                "add" => x.add(&other()?)?,
                "sub" => x.sub(&other()?)?,
                "mul" => x.mul(&other()?)?,
                "neg" => x.neg(),
                "inverse" => x.inverse()?,
                "frobenius" => x.frobenius(),
                "verschiebung" => x.verschiebung(),
                "teichmuller" => x,
                op => return Err(Error::InvalidArgument(format!("unknown operation '{op}'"))),
            };
            rec.set("coords", out.coords()).set("digits", out.digits()).set("valuation", out.valuation());
            Ok(rec)
        }
        WittCmd::VerifyIdentity(a) => {
            let mut rec = Record::new("witt verify-identity", serde_json::to_value(a).expect("serializable"), cfg.seed);
            let holds = verify_famous_identity(a.p, a.h)?;
            rec.set("holds", holds);
            rec.pass = holds;
            Ok(rec)
        }
    }
}

/// Counts for one query, through the counts cache when there is one.
struct Counter {
    path: Option<PathBuf>,
    cache: RefCell<CountsCache>,
    dirty: RefCell<bool>,
}

impl Counter {
    fn new(cfg: &RunConfig) -> Self {
        let path = cache_path(cfg, COUNTS_FILE);
        let cache = match &path {
            Some(p) => {
                let (c, w) = cache::load::<CountsCache>(p);
                warn(w);
                c
            }
            None => CountsCache::default(),
        };
        Counter { path, cache: RefCell::new(cache), dirty: RefCell::new(false) }
    }

    fn key(query: &CountQuery, kind: RingKind) -> String {
        format!("{kind}|{}", serde_json::to_string(query).expect("serializable"))
    }

    fn count(&self, query: &CountQuery, kind: RingKind, q: u64) -> Result<u64> {
        let key = format!("{}|q={q}", Self::key(query, kind));
        if let Some(c) = self.cache.borrow().count(&key) {
            return Ok(c);
        }
        let c = query.count(kind, q)?;
        self.cache.borrow_mut().insert_count(key, c);
        *self.dirty.borrow_mut() = true;
        Ok(c)
    }

    fn polynomial(&self, query: &CountQuery, kind: RingKind) -> Result<wittgr::QPolynomial> {
        let key = Self::key(query, kind);
        if let Some(p) = self.cache.borrow().polynomial(&key) {
            return Ok(p);
        }
        let p = fit_over_q(query.degree_bound(), |q| self.count(query, kind, q))?;
        self.cache.borrow_mut().insert_polynomial(key, &p);
        *self.dirty.borrow_mut() = true;
        Ok(p)
    }

    fn save(&self) {
        if let (Some(p), true) = (&self.path, *self.dirty.borrow()) {
            if let Err(e) = cache::store(p, &*self.cache.borrow()) {
                eprintln!("warning: cache not written: {e}");
            }
        }
    }
}

fn count(cmd: &CountCmd, cfg: &RunConfig) -> Result<Record> {
    let (name, query, cols, opts) = match cmd {
        CountCmd::Cell { n, mu, leq, opts } => {
            let mu = coweight(mu)?;
            if n.is_some_and(|n| n != mu.rank()) {
                return Err(Error::InvalidArgument(format!("mu = {mu} does not have rank {}", n.unwrap_or(0))));
            }
            let q = if *leq { CountQuery::Leq { mu: mu.clone() } } else { CountQuery::Cell { mu: mu.clone() } };
            let cols = vec![("n", json!(mu.rank())), ("mu", json!(fmt_cw(&mu))), ("leq", json!(leq))];
            ("count cell", q, cols, opts)
        }
        CountCmd::Mv { lambda, mu, leq, opts } => {
            let (lambda, mu) = (coweight(lambda)?, coweight(mu)?);
            let cols = vec![("lambda", json!(fmt_cw(&lambda))), ("mu", json!(fmt_cw(&mu))), ("leq", json!(leq))];
            let q = if *leq { CountQuery::MvLeq { lambda, mu } } else { CountQuery::Mv { lambda, mu } };
            ("count mv", q, cols, opts)
        }
        CountCmd::Chain { steps, opts } => {
            let steps = coweights(steps)?;
            let cols = vec![("steps", json!(fmt_steps(&steps)))];
            ("count chain", CountQuery::Chain { steps }, cols, opts)
        }
        CountCmd::Fiber { steps, lambda, opts } => {
            let (steps, lambda) = (coweights(steps)?, coweight(lambda)?);
            let cols = vec![("steps", json!(fmt_steps(&steps))), ("lambda", json!(fmt_cw(&lambda)))];
            ("count fiber", CountQuery::Fiber { steps, lambda }, cols, opts)
        }
    };
    if query.rank() == 0 {
        return Err(Error::InvalidArgument("coweights must be nonempty".into()));
    }
    run_count(name, &query, cols, opts, cfg)
}

fn fmt_cw(c: &Coweight) -> String {
    c.0.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn fmt_steps(s: &[Coweight]) -> String {
    s.iter().map(fmt_cw).collect::<Vec<_>>().join(";")
}

fn run_count(
    name: &str,
    query: &CountQuery,
    cols: Vec<(&str, Value)>,
    opts: &CountOpts,
    cfg: &RunConfig,
) -> Result<Record> {
    let kind: RingKind = opts.kind.parse()?;
    let mut params = serde_json::Map::new();
    for (k, v) in &cols {
        params.insert(k.to_string(), v.clone());
    }
    params.insert("kind".into(), json!(kind));
    params.insert("q".into(), json!(opts.q));
    params.insert("poly".into(), json!(opts.poly));
    let mut rec = Record::new(name, Value::Object(params), cfg.seed);
    let counter = Counter::new(cfg);
    let mut rows = Vec::new();
    let mut counts = Vec::new();
    for &q in &opts.q {
        let c = counter.count(query, kind, q)?;
        counts.push(json!({"q": q, "count": c}));
        let mut row: Vec<String> = cols.iter().map(|(_, v)| crate::output::cell(v)).collect();
        row.extend([kind.to_string(), q.to_string(), c.to_string()]);
        rows.push(row);
    }
    if let [one] = counts.as_slice() {
        rec.set("count", &one["count"]);
    }
    if !counts.is_empty() {
        rec.set("counts", counts);
    }
    if opts.poly || opts.q.is_empty() {
        let p = counter.polynomial(query, kind)?;
        rec.set("polynomial", p.to_coeffs()).set("degree", p.degree());
        for (i, row) in rows.iter_mut().enumerate() {
            let q = opts.q[i] as i128;
            // every count must lie on the fitted polynomial
            if p.eval(q).to_string() != row[row.len() - 1] {
                rec.pass = false;
            }
        }
    }
    counter.save();
    let mut headers: Vec<String> = cols.iter().map(|(k, _)| k.to_string()).collect();
    headers.extend(["kind".into(), "q".into(), "count".into()]);
    rec.table = Some(Table { headers, rows });
    Ok(rec)
}

fn group_of(g: &GroupArgs) -> Result<CoxeterGroup> {
    let group = CoxeterGroup::from_name(&g.type_name)?;
    Ok(match g.len_cap {
        Some(c) => group.with_length_cap(Some(c)),
        None => group,
    })
}

fn group_params(g: &GroupArgs, w: &str, y: Option<&str>) -> Value {
    json!({"type": g.type_name, "len_cap": g.len_cap, "w": w, "y": y})
}

fn kl(g: &GroupArgs, w: &str, y: Option<&str>, cfg: &RunConfig) -> Result<Record> {
    let group = group_of(g)?;
    let mut rec = Record::new("kl compute", group_params(g, w, y), cfg.seed);
    let path = cache_path(cfg, KL_FILE);
    let mut stored = KlCache::default();
    let mut table = KlTable::new(group.clone());
    if let Some(p) = &path {
        let (c, msg) = cache::load::<KlCache>(p);
        warn(msg);
        stored = c;
        stored.seed(&mut table);
    }
    let before = table.len();
    let w = group.parse_element(w)?;
    rec.set("type", group.name()).set("w", group.view(&w));
    match y {
        Some(y) => {
            let y = group.parse_element(y)?;
            let p = table.polynomial(&y, &w)?;
            rec.set("y", group.view(&y)).set("poly", p.to_coeffs()).set("mu", table.mu(&y, &w)?);
        }
        None => {
            let col = table.column(&w)?;
            let mut entries: Vec<_> = col.iter().collect();
            entries.sort_by_key(|(y, _)| (group.length(y), y.raw().to_vec()));
            let list: Vec<Value> = entries
                .iter()
                .map(|(y, p)| json!({"y": group.view(y), "poly": p.to_coeffs()}))
                .collect();
            rec.set("column", list);
        }
    }
    if let (Some(p), true) = (&path, table.len() > before) {
        stored.absorb(&table);
        if let Err(e) = cache::store(p, &stored) {
            eprintln!("warning: cache not written: {e}");
        }
    }
    Ok(rec)
}

fn twist(s: &str) -> Result<Twist> {
    let s = s.trim();
    if s == "id" || s == "identity" {
        return Ok(Twist::Identity);
    }
    if let Some(p) = s.strip_prefix("diagram:") {
        return Ok(Twist::Diagram(codes(p)?.into_iter().map(|x| x as usize).collect()));
    }
    if let Some(k) = s.strip_prefix("affine:") {
        let k = k.trim().parse().map_err(|_| Error::InvalidArgument(format!("bad twist '{s}'")))?;
        return Ok(Twist::Affine { k });
    }
    Err(Error::InvalidArgument(format!("unknown twist '{s}' (id, diagram:PERM or affine:K)")))
}

fn lv(g: &GroupArgs, w: &str, y: Option<&str>, tw: &str, cfg: &RunConfig) -> Result<Record> {
    let group = group_of(g)?;
    let mut params = group_params(g, w, y);
    params["twist"] = json!(tw);
    let mut rec = Record::new("lv compute", params, cfg.seed);
    let mut table = LvTable::new(group.clone(), twist(tw)?)?;
    let w = group.parse_element(w)?;
    if !table.is_twisted_involution(&w) {
        return Err(Error::Domain(format!("{} is not a twisted involution", group.describe(&w))));
    }
    rec.set("type", group.name()).set("w", group.view(&w));
    match y {
        Some(y) => {
            let y = group.parse_element(y)?;
            rec.set("y", group.view(&y)).set("poly", table.polynomial(&y, &w)?.to_coeffs());
        }
        None => {
            let col = table.column(&w)?;
            let mut entries: Vec<_> = col.iter().collect();
            entries.sort_by_key(|(y, _)| (group.length(y), y.raw().to_vec()));
            let list: Vec<Value> = entries
                .iter()
                .map(|(y, p)| json!({"y": group.view(y), "poly": p.to_coeffs()}))
                .collect();
            rec.set("column", list);
        }
    }
    Ok(rec)
}

fn verify(cmd: &VerifyCmd, cfg: &RunConfig) -> Result<Record> {
    let seed = cfg.seed;
    let rec = match cmd {
        VerifyCmd::MinusQ(g) => {
            let group = CoxeterGroup::from_name(&g.type_name)?;
            let cap = g.len_cap.unwrap_or(8);
            let mut rec = Record::new("verify minus-q", json!({"type": g.type_name, "len_cap": cap}), seed);
            let r = verify_minus_q(&group, cap)?;
            rec.pass = r.failures == 0 && r.congruence_failures == 0;
            rec.merge(r);
            rec
        }
        VerifyCmd::SatakeLk { mu, kind } => {
            let mut rec = Record::new("verify satake-lk", json!({"mu": mu, "kind": kind}), seed);
            let top = coweight(mu)?;
            if !top.is_dominant() {
                return Err(Error::InvalidArgument(format!("{top} is not dominant")));
            }
            let r = satake::lk_charge_check(&top, kind.parse()?)?;
            rec.pass = r.pass;
            rec.merge(r);
            rec
        }
        VerifyCmd::KlKostka { mu } => {
            // exploratory: reported, never failed
            let mut rec = Record::new("verify kl-kostka", json!({"mu": mu}), seed);
            let top = coweight(mu)?;
            if !top.is_dominant() {
                return Err(Error::InvalidArgument(format!("{top} is not dominant")));
            }
            rec.merge(satake::kl_kostka_report(&top)?);
            rec
        }
        VerifyCmd::MvLeading { mu, lambda, kind } => {
            let mut rec = Record::new("verify mv-leading", json!({"mu": mu, "lambda": lambda, "kind": kind}), seed);
            let m = coweight(mu)?;
            if !m.is_dominant() {
                return Err(Error::InvalidArgument(format!("{m} is not dominant")));
            }
            let kind: RingKind = kind.parse()?;
            let lambdas = match lambda {
                Some(l) => vec![coweight(l)?],
                None => m.weights_below(),
            };
            let reports: Vec<_> =
                lambdas.iter().map(|l| satake::mv_leading_check(l, &m, kind)).collect::<Result<_>>()?;
            rec.pass = reports.iter().all(|r| r.pass);
            rec.set("failures", reports.iter().filter(|r| !r.pass).count()).set("checks", reports);
            rec
        }
        VerifyCmd::Semismall { steps, kind } => {
            let mut rec = Record::new("verify semismall", json!({"steps": steps, "kind": kind}), seed);
            let r = satake::semismall_report(&coweights(steps)?, kind.parse()?)?;
            rec.pass = r.iter().all(|f| f.pass);
            rec.set("failures", r.iter().filter(|f| !f.pass).count()).set("fibers", r);
            rec
        }
        VerifyCmd::MixedVsEqual { q } => {
            let mut rec = Record::new("verify mixed-vs-equal", json!({"q": q}), seed);
            let r = gl2::equal_char_compare(*q)?;
            rec.pass = r.pass;
            rec.merge(r);
            rec
        }
        VerifyCmd::B3 { q, trials, samples } => {
            let mut rec = Record::new("verify b3", json!({"q": q, "trials": trials, "samples": samples}), seed);
            let r = gl2::Chart::new(*q)?.suite(*trials, seed)?;
            let identity_failures = gl2::identity_check(*q, *samples, seed)?;
            rec.pass = r.pass && identity_failures == 0;
            rec.merge(r).set("identity_failures", identity_failures);
            rec
        }
        VerifyCmd::Quotient { q } => {
            let mut rec = Record::new("verify quotient", json!({"q": q}), seed);
            let r = gl2::quotient_count_check(*q)?;
            rec.pass = r.pass;
            rec.merge(r);
            rec
        }
    };
    Ok(rec)
}

fn resolve_b(a: &BArgs, need_mu: bool) -> Result<(SigmaClass, Option<Coweight>)> {
    let spec: BSpec = a.b.parse()?;
    let mu = a.mu.as_deref().map(coweight).transpose()?;
    if need_mu && mu.is_none() {
        return Err(Error::InvalidArgument("--mu is required".into()));
    }
    let b = spec.resolve(a.p, a.n, mu.as_ref().unwrap_or(&Coweight::zero(a.n)))?;
    Ok((b, mu))
}

fn window_of(w: &WindowArgs, n: usize, mu: &Coweight) -> Window {
    match w.depth {
        Some(d) => Window { n, depth: d, det: w.det.unwrap_or(d) },
        None => {
            let mut def = adlv::default_window(mu);
            if let Some(det) = w.det {
                def.det = det;
            }
            def
        }
    }
}

fn adlv_cmd(cmd: &AdlvCmd, cfg: &RunConfig) -> Result<Record> {
    let seed = cfg.seed;
    match cmd {
        AdlvCmd::Newton(a) | AdlvCmd::Defect(a) => {
            let name = if matches!(cmd, AdlvCmd::Newton(_)) { "adlv newton" } else { "adlv defect" };
            let mut rec = Record::new(name, serde_json::to_value(a).expect("serializable"), seed);
            let (b, _) = resolve_b(a, false)?;
            let nu = b.newton_point(a.p)?;
            rec.set("defect", adlv::defect(&nu))
                .set("kottwitz_index", b.kottwitz_index(a.p)?)
                .set("newton", &nu)
                .set("b", &b);
            Ok(rec)
        }
        AdlvCmd::Dim { b: a, r, window } => {
            let mut p = serde_json::to_value(a).expect("serializable");
            p["r"] = json!(r);
            p["depth"] = json!(window.depth);
            p["det"] = json!(window.det);
            let mut rec = Record::new("adlv dim", p, seed);
            let (b, mu) = resolve_b(a, true)?;
            let mu = mu.expect("checked");
            let w = (window.depth.is_some() || window.det.is_some()).then(|| window_of(window, a.n, &mu));
            let rep = adlv::dimension_report(a.p, &b, &mu, r, w)?;
            rec.pass = rep.pass;
            rec.set("formula", rep.formula_dim).set("fitted", rep.fitted_dim);
            rec.merge(rep);
            Ok(rec)
        }
        AdlvCmd::Count { b: a, r, mode, window } => {
            let mut p = serde_json::to_value(a).expect("serializable");
            p["r"] = json!(r);
            p["mode"] = json!(mode);
            p["depth"] = json!(window.depth);
            p["det"] = json!(window.det);
            let mut rec = Record::new("adlv count", p, seed);
            let (b, mu) = resolve_b(a, true)?;
            let mu = mu.expect("checked");
            let mode: Mode = mode.parse()?;
            let w = window_of(window, a.n, &mu);
            let c = adlv::count_points(a.p, *r, &b, &mu, &w, mode)?;
            rec.set("count", c).set("window", w).set("b", &b);
            Ok(rec)
        }
        AdlvCmd::NormReduce { p, r, b, mu, window } => {
            let mut rec = Record::new(
                "adlv norm-reduce",
                json!({"p": p, "r": r, "b": b, "mu": mu, "depth": window.depth, "det": window.det}),
                seed,
            );
            let mus = coweights(mu)?;
            let specs: Vec<BSpec> = b.split('|').map(str::parse).collect::<Result<_>>()?;
            if specs.len() != mus.len() {
                return Err(Error::InvalidArgument(format!("{} components of b but {} coweights", specs.len(), mus.len())));
            }
            let n = mus[0].rank();
            let bs: Vec<SigmaClass> =
                specs.iter().zip(&mus).map(|(s, m)| s.resolve(*p, n, m)).collect::<Result<_>>()?;
            let w = window_of(window, n, &mus[0]);
            let rep = adlv::norm_reduce(*p, *r, &bs, &mus, &w)?;
            rec.pass = rep.pass;
            rec.merge(rep).set("window", w);
            Ok(rec)
        }
    }
}
