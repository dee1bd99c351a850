//! HTTP front of the coordination platform.
//!
//! Every route except `/health` needs `Authorization: Bearer <token>`; the
//! token decides the acting actor. Mutations go through the platform and
//! thus through the event store, nothing else writes the logs.

pub mod auth;
pub mod error;
mod routes;

use std::future::Future;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use sitecoord_core::store::{Clock, SystemClock};
use sitecoord_core::{Platform, Store};
use tokio::net::TcpListener;

pub use auth::{TokenFileError, Tokens};
pub use error::{status_for, ApiError, ErrorBody};
pub use routes::{router, Acting, AppState, EventsParams, PresenceBody, ReactionBody, SearchParams, TraceParams};

#[derive(Debug, Clone)]
pub struct ServeConfig {
    pub data_dir: PathBuf,
    pub addr: SocketAddr,
    pub token_file: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum ServeError {
    #[error("unreadable data directory {path}: {source}")]
    UnreadableDataDir {
        path: PathBuf,
        source: sitecoord_core::Error,
    },
    #[error(transparent)]
    Tokens(#[from] TokenFileError),
    #[error("cannot bind {addr}: {source}")]
    Bind { addr: SocketAddr, source: std::io::Error },
    #[error("server failed: {0}")]
    Io(#[from] std::io::Error),
}

/// Opens every project log under `data_dir`, verifying each chain.
pub fn open_platform(data_dir: &std::path::Path, clock: Arc<dyn Clock>) -> Result<Platform, ServeError> {
    Store::open(data_dir, clock)
        .map(Platform::new)
        .map_err(|source| ServeError::UnreadableDataDir {
            path: data_dir.to_owned(),
            source,
        })
}

/// A bound, not yet running service.
pub struct Bound {
    pub listener: TcpListener,
    pub state: AppState,
}

impl Bound {
    pub fn local_addr(&self) -> std::io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    /// Serves until `shutdown` resolves. Appends are durable when their
    /// request returns, so stopping needs no flush.
    pub async fn run(self, shutdown: impl Future<Output = ()> + Send + 'static) -> Result<(), ServeError> {
        let app = router(self.state);
        axum::serve(self.listener, app)
            .with_graceful_shutdown(shutdown)
            .await
            .map_err(ServeError::Io)
    }
}

/// Loads the data directory and tokens, then binds the address.
pub async fn bind(config: &ServeConfig) -> Result<Bound, ServeError> {
    let platform = open_platform(&config.data_dir, Arc::new(SystemClock))?;
    let tokens = Tokens::from_file(&config.token_file)?;
    let listener = TcpListener::bind(config.addr)
        .await
        .map_err(|source| ServeError::Bind {
            addr: config.addr,
            source,
        })?;
    Ok(Bound {
        listener,
        state: AppState {
            platform: Arc::new(platform),
            tokens: Arc::new(tokens),
        },
    })
}

/// Waits for Ctrl-C or SIGTERM. On Unix, SIGHUP reloads the token file.
pub async fn shutdown_signal(tokens: Arc<Tokens>) {
    #[cfg(unix)]
    {
        use tokio::signal::unix::{signal, SignalKind};
        let mut hup = signal(SignalKind::hangup()).expect("SIGHUP handler");
        let mut term = signal(SignalKind::terminate()).expect("SIGTERM handler");
        loop {
            tokio::select! {
                _ = tokio::signal::ctrl_c() => return,
                _ = term.recv() => return,
                _ = hup.recv() => match tokens.reload() {
                    Ok(n) => tracing::info!(tokens = n, "token file reloaded"),
                    Err(e) => tracing::warn!(error = %e, "token reload failed; keeping previous tokens"),
                },
            }
        }
    }
    #[cfg(not(unix))]
    {
        let _ = tokens;
        let _ = tokio::signal::ctrl_c().await;
    }
}

/// Binds and serves until interrupted.
pub async fn serve(config: ServeConfig) -> Result<(), ServeError> {
    let bound = bind(&config).await?;
    tracing::info!(addr = %bound.local_addr()?, "listening");
    let tokens = Arc::clone(&bound.state.tokens);
    bound.run(shutdown_signal(tokens)).await
}
