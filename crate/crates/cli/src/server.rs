//! JSON API over in-memory mutation sessions.
//!
//! Each session holds a seed, its initial seed and the list of directions
//! applied so far; replaying that list from the initial seed reproduces the
//! current one. Sessions are guarded by their own mutex, so mutations of one
//! session are serialized while different sessions proceed in parallel.
//! With a journal file every state change is appended as one JSON line and
//! replayed at startup.

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::{Path as UrlPath, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};

use monocat::cluster::{self, ClusterError, Limits, Seed};
use monocat::laurent::VarId;
use monocat::qchar::{self, QcharError, Route};
use monocat::roots::{DynkinData, RootVector};

use crate::commands::{self, root_json, CliError};

#[derive(Debug)]
pub struct ApiError {
    pub status: StatusCode,
    pub message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            message: message.into(),
        }
    }

    fn not_found(id: &str) -> Self {
        Self::new(StatusCode::NOT_FOUND, format!("unknown session {}", id))
    }
}

impl From<CliError> for ApiError {
    fn from(e: CliError) -> Self {
        let status = match e {
            CliError::Usage(_) => StatusCode::BAD_REQUEST,
            CliError::Limit(_) => StatusCode::UNPROCESSABLE_ENTITY,
            CliError::Failed(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        ApiError::new(status, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "error": self.message, "status": self.status.as_u16().to_string() });
        (self.status, Json(body)).into_response()
    }
}

type ApiResult = Result<Json<Value>, ApiError>;

/// One exploration session.
#[derive(Clone, Debug)]
pub struct SessionState {
    pub id: String,
    pub dynkin: DynkinData,
    pub ell: usize,
    pub initial: Seed,
    pub current: Seed,
    /// 0-based directions, oldest first.
    pub history: Vec<usize>,
}

impl SessionState {
    pub fn new(id: String, dynkin: DynkinData, ell: usize) -> Result<Self, CliError> {
        let initial = commands::initial_seed(&dynkin, ell)?;
        Ok(SessionState {
            id,
            dynkin,
            ell,
            current: initial.clone(),
            initial,
            history: Vec::new(),
        })
    }

    pub fn replay(&self) -> Result<Seed, ClusterError> {
        self.history.iter().try_fold(self.initial.clone(), |s, &k| s.mutate(k))
    }

    fn initial_vars(&self) -> Vec<VarId> {
        let n = self.initial.n_mutable();
        self.initial.vars[..n]
            .iter()
            .filter_map(|p| p.as_term().and_then(|(m, _)| m.variables().next()))
            .collect()
    }

    /// Root label of the variable at a mutable position, for level one.
    fn root_label(&self, pos: usize) -> Option<RootVector> {
        if self.ell != 1 || pos >= self.current.n_mutable() {
            return None;
        }
        let den = cluster::denominator_vector(&self.current.vars[pos], &self.initial_vars());
        self.dynkin.is_almost_positive(&den).then_some(den)
    }

    pub fn view(&self) -> Value {
        let n = self.current.n_mutable();
        let initial = self.initial_vars();
        let variables: Vec<Value> = self
            .current
            .vars
            .iter()
            .enumerate()
            .map(|(pos, p)| {
                let frozen = pos >= n;
                json!({
                    "position": (pos + 1).to_string(),
                    "value": p.to_string(),
                    "frozen": frozen,
                    "denominator": if frozen { Value::Null } else { root_json(&cluster::denominator_vector(p, &initial)) },
                    "label": self.root_label(pos).map(|r| root_json(&r)).unwrap_or(Value::Null),
                })
            })
            .collect();
        json!({
            "session": self.id,
            "type": self.dynkin.name(),
            "i0": self.dynkin.i0().iter().map(|i| i.to_string()).collect::<Vec<_>>(),
            "ell": self.ell.to_string(),
            "seed": self.current.to_json(),
            "variables": variables,
            "history": self.history.iter().map(|k| (k + 1).to_string()).collect::<Vec<_>>(),
        })
    }
}

/// Shared server state.
pub struct AppState {
    sessions: RwLock<HashMap<String, Arc<Mutex<SessionState>>>>,
    next_id: AtomicU64,
    atlases: RwLock<HashMap<(String, Vec<usize>, usize), Value>>,
    journal: Option<Mutex<File>>,
    limits: Limits,
}

#[derive(Debug, Deserialize, serde::Serialize)]
#[serde(tag = "op", rename_all = "lowercase")]
enum JournalEntry {
    Create {
        id: String,
        #[serde(rename = "type")]
        type_name: String,
        i0: Vec<usize>,
        ell: usize,
    },
    Mutate {
        id: String,
        k: usize,
    },
    Undo {
        id: String,
    },
}

impl AppState {
    pub fn new(limits: Limits) -> Self {
        AppState {
            sessions: RwLock::new(HashMap::new()),
            next_id: AtomicU64::new(1),
            atlases: RwLock::new(HashMap::new()),
            journal: None,
            limits,
        }
    }

    /// State backed by an append-only journal; existing entries are replayed.
    pub fn with_journal(limits: Limits, path: &Path) -> std::io::Result<Self> {
        let mut state = AppState::new(limits);
        if path.exists() {
            for line in BufReader::new(File::open(path)?).lines() {
                let line = line?;
                if line.trim().is_empty() {
                    continue;
                }
                let entry: JournalEntry = serde_json::from_str(&line)
                    .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
                state.apply(entry).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e.message))?;
            }
        }
        state.journal = Some(Mutex::new(OpenOptions::new().create(true).append(true).open(path)?));
        Ok(state)
    }

    fn record(&self, entry: &JournalEntry) -> Result<(), ApiError> {
        if let Some(j) = &self.journal {
            let mut f = j.lock().expect("journal lock poisoned");
            writeln!(f, "{}", serde_json::to_string(entry).expect("serializable"))
                .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
        }
        Ok(())
    }

    fn session(&self, id: &str) -> Result<Arc<Mutex<SessionState>>, ApiError> {
        self.sessions
            .read()
            .expect("session table poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(id))
    }

    fn apply(&mut self, entry: JournalEntry) -> Result<(), ApiError> {
        match entry {
            JournalEntry::Create { id, type_name, i0, ell } => {
                let d = DynkinData::parse_with_i0(&type_name, Some(&i0))
                    .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.to_string()))?;
                let n: u64 = id.parse().unwrap_or(0);
                self.next_id.fetch_max(n + 1, Ordering::SeqCst);
                let s = SessionState::new(id.clone(), d, ell)?;
                self.sessions.write().expect("poisoned").insert(id, Arc::new(Mutex::new(s)));
            }
            JournalEntry::Mutate { id, k } => {
                mutate_session(&mut self.session(&id)?.lock().expect("poisoned"), k)?;
            }
            JournalEntry::Undo { id } => {
                undo_session(&mut self.session(&id)?.lock().expect("poisoned"))?;
            }
        }
        Ok(())
    }
}

fn mutate_session(s: &mut SessionState, k: usize) -> Result<cluster::ExchangeRelation, ApiError> {
    if k >= s.current.n_mutable() {
        return Err(ApiError::new(
            StatusCode::CONFLICT,
            format!("direction {} is frozen or out of range", k + 1),
        ));
    }
    let (next, rel) = s
        .current
        .mutate_with_relation(k)
        .map_err(|e| ApiError::new(StatusCode::CONFLICT, e.to_string()))?;
    s.current = next;
    s.history.push(k);
    Ok(rel)
}

fn undo_session(s: &mut SessionState) -> Result<(), ApiError> {
    let k = s
        .history
        .pop()
        .ok_or_else(|| ApiError::new(StatusCode::CONFLICT, "nothing to undo"))?;
    s.current = s
        .current
        .mutate(k)
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    Ok(())
}

/// Accepts a JSON number or a decimal string.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum Count {
    Num(u64),
    Str(String),
}

impl Count {
    fn get(&self) -> Result<usize, ApiError> {
        match self {
            Count::Num(n) => Ok(*n as usize),
            Count::Str(s) => s
                .trim()
                .parse()
                .map_err(|_| ApiError::new(StatusCode::BAD_REQUEST, format!("{:?} is not a count", s))),
        }
    }
}

#[derive(Debug, Deserialize)]
pub struct CreateRequest {
    #[serde(rename = "type")]
    pub type_name: String,
    pub i0: Option<Vec<Count>>,
    pub ell: Option<Count>,
}

#[derive(Debug, Deserialize)]
pub struct MutateRequest {
    /// 1-based direction.
    pub k: Count,
}

#[derive(Debug, Deserialize)]
pub struct CharQuery {
    pub var: String,
}

#[derive(Debug, Deserialize)]
pub struct AtlasQuery {
    #[serde(rename = "type")]
    pub type_name: String,
    pub i0: Option<String>,
    pub ell: Option<usize>,
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/session", post(create_session))
        .route("/session/:id/seed", get(get_seed))
        .route("/session/:id/mutate", post(mutate))
        .route("/session/:id/undo", post(undo))
        .route("/session/:id/char", get(character))
        .route("/atlas", get(atlas))
        .with_state(state)
}

async fn create_session(State(st): State<Arc<AppState>>, Json(req): Json<CreateRequest>) -> ApiResult {
    let d = match &req.i0 {
        None => DynkinData::parse(&req.type_name),
        Some(v) => {
            let v = v.iter().map(Count::get).collect::<Result<Vec<_>, _>>()?;
            DynkinData::parse_with_i0(&req.type_name, Some(&v))
        }
    }
    .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.to_string()))?;
    let ell = req.ell.as_ref().map(Count::get).transpose()?.unwrap_or(1);
    let id = st.next_id.fetch_add(1, Ordering::SeqCst).to_string();
    let s = SessionState::new(id.clone(), d.clone(), ell)?;
    st.record(&JournalEntry::Create {
        id: id.clone(),
        type_name: d.name(),
        i0: d.i0(),
        ell,
    })?;
    let view = s.view();
    st.sessions.write().expect("poisoned").insert(id, Arc::new(Mutex::new(s)));
    Ok(Json(view))
}

async fn get_seed(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult {
    let s = st.session(&id)?;
    let view = s.lock().expect("poisoned").view();
    Ok(Json(view))
}

async fn mutate(
    State(st): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    Json(req): Json<MutateRequest>,
) -> ApiResult {
    let k = req.k.get()?;
    if k == 0 {
        return Err(ApiError::new(StatusCode::BAD_REQUEST, "directions are 1-based"));
    }
    let s = st.session(&id)?;
    let mut guard = s.lock().expect("poisoned");
    let before = guard.current.clone();
    let rel = mutate_session(&mut guard, k - 1)?;
    st.record(&JournalEntry::Mutate { id, k: k - 1 })?;
    let side = |mono: &[(usize, u32)]| {
        let value = mono
            .iter()
            .fold(monocat::laurent::LaurentPoly::one(), |acc, &(row, e)| acc.mul(&before.vars[row].pow(e)));
        json!({
            "factors": mono.iter().map(|&(row, e)| json!({ "position": (row + 1).to_string(), "exponent": e.to_string() })).collect::<Vec<_>>(),
            "value": value.to_string(),
        })
    };
    let relation = json!({
        "direction": k.to_string(),
        "old": rel.old.to_string(),
        "new": rel.new.to_string(),
        "plus": side(&rel.plus),
        "minus": side(&rel.minus),
    });
    Ok(Json(json!({ "seed": guard.view(), "relation": relation })))
}

async fn undo(State(st): State<Arc<AppState>>, UrlPath(id): UrlPath<String>) -> ApiResult {
    let s = st.session(&id)?;
    let mut guard = s.lock().expect("poisoned");
    undo_session(&mut guard)?;
    st.record(&JournalEntry::Undo { id })?;
    Ok(Json(guard.view()))
}

fn out_of_scope(msg: impl Into<String>) -> ApiError {
    ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, msg)
}

/// `var` is a 1-based position in the current seed or a root label
/// `c1,...,cn`.
async fn character(
    State(st): State<Arc<AppState>>,
    UrlPath(id): UrlPath<String>,
    Query(q): Query<CharQuery>,
) -> ApiResult {
    let snapshot = st.session(&id)?.lock().expect("poisoned").clone();
    if snapshot.ell != 1 {
        return Err(out_of_scope("characters are served for level one only"));
    }
    let d = snapshot.dynkin.clone();
    let n = d.n;
    let (label, monomial) = if q.var.contains(',') {
        let r = commands::root(&d, &q.var)?;
        if !d.is_almost_positive(&r) {
            return Err(ApiError::new(StatusCode::BAD_REQUEST, format!("{} is not an almost positive root", r)));
        }
        (Some(r.clone()), qchar::y_gamma(&r, &d))
    } else {
        let pos: usize = q
            .var
            .trim()
            .parse()
            .map_err(|_| ApiError::new(StatusCode::BAD_REQUEST, format!("bad variable {:?}", q.var)))?;
        match pos {
            p if p >= 1 && p <= n => {
                let r = snapshot
                    .root_label(p - 1)
                    .ok_or_else(|| out_of_scope("variable has no root label"))?;
                (Some(r.clone()), qchar::y_gamma(&r, &d))
            }
            p if p > n && p <= 2 * n => (None, qchar::frozen_monomial(p - n - 1, &d)),
            _ => return Err(ApiError::new(StatusCode::BAD_REQUEST, format!("position {} out of range", pos))),
        }
    };
    let computed = tokio::task::spawn_blocking(move || qchar::truncated_char_c1(&monomial, &d, Route::Fpoly))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    let chi = computed.map_err(|e| match e {
        QcharError::OutOfProvedScope(m) => out_of_scope(m),
        QcharError::CapExceeded(m) => out_of_scope(m),
        other => ApiError::from(CliError::from(other)),
    })?;
    Ok(Json(json!({
        "var": q.var,
        "label": label.map(|r| root_json(&r)).unwrap_or(Value::Null),
        "character": chi.to_json(),
    })))
}

async fn atlas(State(st): State<Arc<AppState>>, Query(q): Query<AtlasQuery>) -> ApiResult {
    let d = commands::dynkin(&q.type_name, q.i0.as_deref())?;
    let ell = q.ell.unwrap_or(1);
    let key = (d.name(), d.i0(), ell);
    if let Some(v) = st.atlases.read().expect("poisoned").get(&key) {
        return Ok(Json(v.clone()));
    }
    let limits = st.limits;
    let out = tokio::task::spawn_blocking(move || commands::enumerate(&d, ell, limits, false))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    st.atlases.write().expect("poisoned").insert(key, out.json.clone());
    Ok(Json(out.json))
}

/// Runs the server until interrupted.
pub async fn serve(addr: std::net::SocketAddr, state: Arc<AppState>) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
