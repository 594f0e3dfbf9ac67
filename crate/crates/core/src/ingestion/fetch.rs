use std::time::Duration;

use thiserror::Error;

pub const MAX_REDIRECTS: u32 = 5;

#[derive(Debug, Error)]
pub enum FetchError {
    #[error("request timed out")]
    Timeout,
    #[error("more than {MAX_REDIRECTS} redirects")]
    TooManyRedirects,
    #[error("server answered with HTTP status {0}")]
    HttpStatus(u16),
    #[error("network unreachable: {0}")]
    NetworkUnreachable(String),
    #[error("invalid feed URL {0:?}")]
    InvalidUrl(String),
}

/// Downloads a feed body over HTTP(S), following at most
/// [`MAX_REDIRECTS`] redirects.
pub fn fetch_feed(url: &str, timeout: Duration) -> Result<Vec<u8>, FetchError> {
    let parsed = url::Url::parse(url).map_err(|_| FetchError::InvalidUrl(url.to_string()))?;
    if !matches!(parsed.scheme(), "http" | "https") {
        return Err(FetchError::InvalidUrl(url.to_string()));
    }
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(timeout))
        .max_redirects(MAX_REDIRECTS)
        .max_redirects_will_error(true)
        .http_status_as_error(false)
        .build()
        .into();
    let mut resp = agent.get(url).call().map_err(map_error)?;
    let status = resp.status().as_u16();
    if status != 200 {
        return Err(FetchError::HttpStatus(status));
    }
    resp.body_mut()
        .with_config()
        .limit(64 * 1024 * 1024)
        .read_to_vec()
        .map_err(map_error)
}

fn map_error(e: ureq::Error) -> FetchError {
    match e {
        ureq::Error::Timeout(_) => FetchError::Timeout,
        ureq::Error::TooManyRedirects => FetchError::TooManyRedirects,
        ureq::Error::StatusCode(code) => FetchError::HttpStatus(code),
        ureq::Error::BadUri(u) => FetchError::InvalidUrl(u),
        ureq::Error::Io(io) if io.kind() == std::io::ErrorKind::TimedOut => FetchError::Timeout,
        other => FetchError::NetworkUnreachable(other.to_string()),
    }
}
