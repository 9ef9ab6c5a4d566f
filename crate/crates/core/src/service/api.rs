//! Transport-independent JSON session API. The HTTP server forwards every
//! request to [`Api::handle`].

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use serde::Deserialize;
use serde_json::{json, Value};

use crate::corpus::{Corpus, EntryKind, Payload};
use crate::derivation::{resolve_program, Session, SessionError};
use crate::kernel::{clause_to_string, program_to_string, PredKey};
use crate::rules::{fold_matches, FolderRef, FolderSource, RuleContext, Step};
use crate::verify::{check_lemma, compare_extensions, LemmaSpec};

use super::Bounds;

#[derive(Debug, Clone, PartialEq)]
pub struct ApiResponse {
    pub status: u16,
    pub body: Value,
}

impl ApiResponse {
    fn ok(body: Value) -> Self {
        ApiResponse { status: 200, body }
    }

    fn error(status: u16, code: &str, message: impl Into<String>) -> Self {
        ApiResponse { status, body: json!({ "error": code, "message": message.into() }) }
    }
}

struct Entry {
    session: Session,
    base_ref: String,
    revision: u64,
}

/// Sessions are independent; each is guarded by its own lock so that
/// mutations of one session are serialized.
pub struct Api {
    corpus: Corpus,
    bounds: Bounds,
    sessions: RwLock<HashMap<String, Arc<Mutex<Entry>>>>,
    next_id: AtomicU64,
}

#[derive(Deserialize)]
struct CreateReq {
    base: String,
}

#[derive(Deserialize)]
struct ApplyReq {
    revision: u64,
    step: Step,
    #[serde(default)]
    verify_now: bool,
}

#[derive(Deserialize)]
struct RevisionReq {
    revision: u64,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum VerifyReq {
    /// Base against current state for one predicate (default: the root).
    Extension {
        #[serde(default)]
        predicate: Option<String>,
    },
    Lemma {
        lemma: LemmaSpec,
    },
}

fn parse_body<T: for<'de> Deserialize<'de>>(body: &str) -> Result<T, ApiResponse> {
    serde_json::from_str(body).map_err(|e| ApiResponse::error(400, "bad_request", e.to_string()))
}

fn session_error(e: SessionError) -> ApiResponse {
    let (status, code) = match &e {
        SessionError::BranchConflict => (409, "branch_conflict"),
        SessionError::CandidateDrift { .. } | SessionError::CandidateMissing { .. } => (422, "candidate_error"),
        SessionError::Rule(_) => (422, "rule_error"),
        SessionError::Abduce(_) => (422, "abduce_error"),
        SessionError::Engine(_) => (422, "engine_error"),
    };
    let detail = match &e {
        SessionError::Rule(r) => format!("{r:?}").split(['(', ' ', '{']).next().unwrap_or_default().to_string(),
        _ => String::new(),
    };
    let mut r = ApiResponse::error(status, code, e.to_string());
    if !detail.is_empty() {
        r.body["reason"] = json!(detail);
    }
    r
}

fn parse_folder(s: &str) -> Option<FolderRef> {
    let (src, clause) = s.split_once(':')?;
    let source = match src {
        "current" => FolderSource::Current,
        "base" => FolderSource::Base,
        "new_definitions" | "definitions" => FolderSource::NewDefinitions,
        _ => return None,
    };
    Some(FolderRef::new(source, clause))
}

impl Api {
    pub fn new(corpus: Corpus, bounds: Bounds) -> Api {
        Api { corpus, bounds, sessions: RwLock::new(HashMap::new()), next_id: AtomicU64::new(1) }
    }

    pub fn handle(&self, method: &str, path: &str, body: &str) -> ApiResponse {
        let segs: Vec<&str> = path.trim_matches('/').split('/').filter(|s| !s.is_empty()).collect();
        let r = match (method, segs.as_slice()) {
            ("GET", ["corpus"]) => Ok(self.corpus_list()),
            ("GET", ["corpus", name]) => self.corpus_entry(name),
            ("POST", ["sessions"]) => self.create(body),
            ("GET", ["sessions", id]) => self.with(id, |e| Ok(state(e))),
            ("GET", ["sessions", id, "script"]) => self.with(id, |e| {
                Ok(ApiResponse::ok(serde_json::to_value(e.session.export_script(&e.session.id, &e.base_ref, None)).expect("script serializes")))
            }),
            ("GET", ["sessions", id, "clauses", clause, "candidates"]) => self.with(id, |e| candidates(e, clause)),
            ("GET", ["sessions", id, "clauses", clause, "fold-matches", folder]) => {
                self.with(id, |e| matches(e, clause, folder))
            }
            ("POST", ["sessions", id, "apply"]) => self.with_mut(id, body, apply),
            ("POST", ["sessions", id, "undo"]) => self.with_mut(id, body, |e, b| step_cursor(e, b, true)),
            ("POST", ["sessions", id, "redo"]) => self.with_mut(id, body, |e, b| step_cursor(e, b, false)),
            ("POST", ["sessions", id, "verify"]) => {
                let bounds = self.bounds.clone();
                self.with(id, |e| verify(e, body, &bounds))
            }
            _ => Err(ApiResponse::error(404, "not_found", format!("no route {method} {path}"))),
        };
        r.unwrap_or_else(|e| e)
    }

    fn corpus_list(&self) -> ApiResponse {
        let kinds = [EntryKind::Program, EntryKind::Lemma, EntryKind::Script];
        let list: serde_json::Map<String, Value> = kinds
            .iter()
            .map(|k| (serde_json::to_value(k).unwrap().as_str().unwrap().to_string(), json!(self.corpus.list(Some(*k)))))
            .collect();
        ApiResponse::ok(Value::Object(list))
    }

    fn corpus_entry(&self, name: &str) -> Result<ApiResponse, ApiResponse> {
        let e = self.corpus.load(name).map_err(|e| ApiResponse::error(404, "unknown_entry", e.to_string()))?;
        let payload = match e.payload {
            Payload::Program(p) => json!(program_to_string(&p)),
            Payload::Lemma(l) => serde_json::to_value(l.to_spec()).expect("lemma serializes"),
            Payload::Script(s) => serde_json::to_value(s).expect("script serializes"),
        };
        Ok(ApiResponse::ok(json!({ "name": e.name, "kind": e.kind, "payload": payload })))
    }

    fn create(&self, body: &str) -> Result<ApiResponse, ApiResponse> {
        let req: CreateReq = parse_body(body)?;
        let base = resolve_program(&self.corpus, &req.base).map_err(|e| ApiResponse::error(422, "unresolved_base", e.to_string()))?;
        let id = format!("s{}", self.next_id.fetch_add(1, Ordering::Relaxed));
        let mut session = Session::new(id.clone(), base, self.corpus.all_lemmas().unwrap_or_default());
        session.audit.domain = self.bounds.domain.clone();
        session.audit.max_list_len = self.bounds.max_list_len;
        let entry = Entry { session, base_ref: req.base, revision: 0 };
        let resp = state(&entry);
        self.sessions.write().expect("session map lock").insert(id, Arc::new(Mutex::new(entry)));
        Ok(ApiResponse { status: 201, body: resp.body })
    }

    fn entry(&self, id: &str) -> Result<Arc<Mutex<Entry>>, ApiResponse> {
        self.sessions
            .read()
            .expect("session map lock")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiResponse::error(404, "unknown_session", format!("no session {id}")))
    }

    fn with(&self, id: &str, f: impl FnOnce(&Entry) -> Result<ApiResponse, ApiResponse>) -> Result<ApiResponse, ApiResponse> {
        let e = self.entry(id)?;
        let guard = e.lock().expect("session lock");
        f(&guard)
    }

    fn with_mut(
        &self,
        id: &str,
        body: &str,
        f: impl FnOnce(&mut Entry, &str) -> Result<ApiResponse, ApiResponse>,
    ) -> Result<ApiResponse, ApiResponse> {
        let e = self.entry(id)?;
        let mut guard = e.lock().expect("session lock");
        f(&mut guard, body)
    }
}

fn state(e: &Entry) -> ApiResponse {
    let s = &e.session;
    let cur = s.current();
    let clauses: Vec<Value> = cur
        .program
        .clauses()
        .iter()
        .map(|c| json!({ "id": c.id, "text": clause_to_string(c), "origin": cur.program.provenance(&c.id) }))
        .collect();
    let history: Vec<Value> = s.history()[1..]
        .iter()
        .enumerate()
        .map(|(i, snap)| {
            json!({
                "index": i + 1,
                "application": snap.application,
                "diff": snap.diff,
                "audit_error": snap.audit_error,
            })
        })
        .collect();
    ApiResponse::ok(json!({
        "session": s.id,
        "revision": e.revision,
        "cursor": s.cursor(),
        "root": cur.root,
        "program": program_to_string(&cur.program),
        "clauses": clauses,
        "history": history,
    }))
}

fn check_revision(e: &Entry, seen: u64) -> Result<(), ApiResponse> {
    if seen != e.revision {
        return Err(ApiResponse::error(409, "stale_revision", format!("revision {seen} is stale; current is {}", e.revision)));
    }
    Ok(())
}

fn apply(e: &mut Entry, body: &str) -> Result<ApiResponse, ApiResponse> {
    let req: ApplyReq = parse_body(body)?;
    check_revision(e, req.revision)?;
    e.session.apply(&req.step, req.verify_now).map_err(session_error)?;
    e.revision += 1;
    Ok(state(e))
}

fn step_cursor(e: &mut Entry, body: &str, back: bool) -> Result<ApiResponse, ApiResponse> {
    let req: RevisionReq = parse_body(body)?;
    check_revision(e, req.revision)?;
    let moved = if back { e.session.undo() } else { e.session.redo() };
    if !moved {
        return Err(ApiResponse::error(409, "no_history", "nothing to move to"));
    }
    e.revision += 1;
    Ok(state(e))
}

fn candidates(e: &Entry, clause: &str) -> Result<ApiResponse, ApiResponse> {
    let cs = e.session.candidates(clause, None, Default::default()).map_err(session_error)?;
    Ok(ApiResponse::ok(json!({ "revision": e.revision, "clause": clause, "candidates": cs })))
}

fn matches(e: &Entry, clause: &str, folder: &str) -> Result<ApiResponse, ApiResponse> {
    let fref = parse_folder(folder).ok_or_else(|| ApiResponse::error(400, "bad_request", format!("bad folder `{folder}`")))?;
    let cur = e.session.current();
    let ctx = RuleContext { base: &cur.base_view, definitions: &cur.definitions, lemmas: e.session.lemmas() };
    let f = ctx.folder(&cur.program, &fref).map_err(|r| session_error(r.into()))?;
    let c = cur.program.clause(clause).ok_or_else(|| ApiResponse::error(404, "unknown_clause", format!("no clause {clause}")))?;
    Ok(ApiResponse::ok(json!({ "revision": e.revision, "matches": fold_matches(c, f) })))
}

fn verify(e: &Entry, body: &str, b: &Bounds) -> Result<ApiResponse, ApiResponse> {
    let req: VerifyReq = parse_body(body)?;
    let s = &e.session;
    let cur = s.current();
    let engine = |x: crate::engine::EngineError| ApiResponse::error(422, "engine_error", x.to_string());
    match req {
        VerifyReq::Extension { predicate } => {
            let key = match predicate {
                Some(t) => PredKey::parse(&t).ok_or_else(|| ApiResponse::error(400, "bad_request", format!("bad predicate `{t}`")))?,
                None => cur.root.clone().ok_or_else(|| ApiResponse::error(422, "no_root", "session has no root predicate"))?,
            };
            let d = compare_extensions(&cur.base_view, &cur.program, &key, &b.domain, b.max_list_len, b.limits).map_err(engine)?;
            Ok(ApiResponse::ok(json!({ "revision": e.revision, "diff": d })))
        }
        VerifyReq::Lemma { lemma } => {
            let l = crate::verify::Lemma::from_spec(&lemma).map_err(|x| ApiResponse::error(422, "lemma_error", x.to_string()))?;
            let v = check_lemma(&l, &cur.program, &b.domain, b.max_list_len, b.limits).map_err(engine)?;
            Ok(ApiResponse::ok(json!({ "revision": e.revision, "verdict": v })))
        }
    }
}
