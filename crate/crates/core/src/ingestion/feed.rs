//! RSS 2.0 and Atom 1.0 feed parsing.

use quick_xml::escape::resolve_html5_entity;
use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::labeling::normalize_domain;

/// One news article from a feed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeedDocument {
    pub title: String,
    pub link: String,
    pub body: Option<String>,
    /// Publication timestamp exactly as written in the feed.
    pub published: Option<String>,
    pub source_domain: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeedError {
    #[error("malformed XML: {0}")]
    MalformedXml(String),
    #[error("root element <{0}> is neither <rss> nor <feed>")]
    UnrecognizedFeedRoot(String),
    #[error("unsupported encoding {0:?}; only UTF-8 feeds are accepted")]
    UnsupportedEncoding(String),
}

#[derive(Debug, Default)]
struct Element {
    name: String,
    attrs: Vec<(String, String)>,
    children: Vec<Node>,
}

#[derive(Debug)]
enum Node {
    Element(Element),
    Text(String),
}

impl Element {
    fn child(&self, name: &str) -> Option<&Element> {
        self.elements().find(|e| e.name == name)
    }

    fn elements(&self) -> impl Iterator<Item = &Element> {
        self.children.iter().filter_map(|n| match n {
            Node::Element(e) => Some(e),
            Node::Text(_) => None,
        })
    }

    fn attr(&self, name: &str) -> Option<&str> {
        self.attrs
            .iter()
            .find(|(k, _)| k == name)
            .map(|(_, v)| v.as_str())
    }

    fn text(&self) -> String {
        let mut out = String::new();
        self.collect_text(&mut out);
        out
    }

    fn collect_text(&self, out: &mut String) {
        for n in &self.children {
            match n {
                Node::Text(t) => out.push_str(t),
                Node::Element(e) => {
                    e.collect_text(out);
                    out.push(' ');
                }
            }
        }
    }
}

fn local_name(qname: &[u8]) -> String {
    let s = String::from_utf8_lossy(qname);
    match s.rfind(':') {
        Some(i) => s[i + 1..].to_string(),
        None => s.into_owned(),
    }
}

fn malformed(e: impl std::fmt::Display) -> FeedError {
    FeedError::MalformedXml(e.to_string())
}

fn start_element(e: &BytesStart<'_>) -> Result<Element, FeedError> {
    let mut attrs = Vec::new();
    for a in e.attributes() {
        let a = a.map_err(malformed)?;
        let raw = std::str::from_utf8(&a.value).map_err(malformed)?;
        attrs.push((local_name(a.key.as_ref()), decode_entities(raw)));
    }
    Ok(Element {
        name: local_name(e.name().as_ref()),
        attrs,
        children: Vec::new(),
    })
}

fn parse_tree(text: &str) -> Result<Element, FeedError> {
    let mut reader = Reader::from_str(text);
    reader.config_mut().check_end_names = true;
    let mut stack: Vec<Element> = Vec::new();
    let mut root: Option<Element> = None;

    let attach = |stack: &mut Vec<Element>, root: &mut Option<Element>, el: Element| {
        match stack.last_mut() {
            Some(parent) => parent.children.push(Node::Element(el)),
            None if root.is_none() => *root = Some(el),
            None => return Err(malformed("more than one root element")),
        }
        Ok(())
    };

    loop {
        match reader.read_event().map_err(malformed)? {
            Event::Decl(d) => {
                if let Some(enc) = d.encoding() {
                    let enc = enc.map_err(malformed)?;
                    let enc = String::from_utf8_lossy(&enc).to_string();
                    if !enc.eq_ignore_ascii_case("utf-8") && !enc.eq_ignore_ascii_case("utf8") {
                        return Err(FeedError::UnsupportedEncoding(enc));
                    }
                }
            }
            Event::Start(e) => {
                if root.is_some() && stack.is_empty() {
                    return Err(malformed("more than one root element"));
                }
                stack.push(start_element(&e)?);
            }
            Event::Empty(e) => {
                let el = start_element(&e)?;
                attach(&mut stack, &mut root, el)?;
            }
            Event::End(_) => {
                let el = stack.pop().ok_or_else(|| malformed("unbalanced end tag"))?;
                attach(&mut stack, &mut root, el)?;
            }
            Event::Text(t) => {
                let raw = std::str::from_utf8(&t).map_err(malformed)?;
                match stack.last_mut() {
                    Some(parent) => parent.children.push(Node::Text(decode_entities(raw))),
                    None if raw.trim().is_empty() => {}
                    None => return Err(malformed("text outside the root element")),
                }
            }
            Event::CData(c) => {
                let raw = String::from_utf8_lossy(&c).into_owned();
                match stack.last_mut() {
                    Some(parent) => parent.children.push(Node::Text(raw)),
                    None => return Err(malformed("CDATA outside the root element")),
                }
            }
            Event::Eof => break,
            _ => {}
        }
    }
    if let Some(open) = stack.last() {
        return Err(malformed(format!("unclosed element <{}>", open.name)));
    }
    root.ok_or_else(|| malformed("no root element"))
}

/// Decodes XML and HTML character references. Unknown or unterminated
/// references are kept verbatim.
fn decode_entities(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut rest = raw;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        let after = &rest[amp + 1..];
        let resolved = after.find(';').filter(|&end| end <= 32).and_then(|end| {
            let name = &after[..end];
            let decoded = if let Some(num) = name.strip_prefix('#') {
                let code = match num.strip_prefix(['x', 'X']) {
                    Some(hex) => u32::from_str_radix(hex, 16).ok(),
                    None => num.parse().ok(),
                };
                code.and_then(char::from_u32).map(String::from)
            } else {
                resolve_html5_entity(name).map(String::from)
            };
            decoded.map(|d| (d, end))
        });
        match resolved {
            Some((d, end)) => {
                out.push_str(&d);
                rest = &after[end + 1..];
            }
            None => {
                out.push('&');
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}

/// Removes `<...>` markup, decodes entities once more and collapses
/// whitespace.
fn strip_markup(s: &str) -> String {
    let mut text = String::with_capacity(s.len());
    let mut in_tag = false;
    for c in s.chars() {
        match (c, in_tag) {
            ('<', false) => in_tag = true,
            ('>', true) => {
                in_tag = false;
                text.push(' ');
            }
            (_, false) => text.push(c),
            _ => {}
        }
    }
    collapse_whitespace(&decode_entities(&text))
}

fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn nonempty(s: String) -> Option<String> {
    if s.is_empty() {
        None
    } else {
        Some(s)
    }
}

fn domain_of(link: &str) -> Option<String> {
    url::Url::parse(link)
        .ok()
        .and_then(|u| u.host_str().and_then(normalize_domain))
}

fn build(
    title: String,
    link: String,
    body: Option<String>,
    published: Option<String>,
) -> Option<FeedDocument> {
    if title.is_empty() && link.is_empty() {
        return None;
    }
    Some(FeedDocument {
        source_domain: domain_of(&link),
        title,
        link,
        body,
        published,
    })
}

fn rss_item(item: &Element) -> Option<FeedDocument> {
    let title = item
        .child("title")
        .map(|e| strip_markup(&e.text()))
        .unwrap_or_default();
    let link = item
        .child("link")
        .map(|e| e.text().trim().to_string())
        .unwrap_or_default();
    let body = item
        .child("description")
        .or_else(|| item.child("encoded"))
        .map(|e| strip_markup(&e.text()))
        .and_then(nonempty);
    let published = item
        .child("pubDate")
        .map(|e| e.text().trim().to_string())
        .and_then(nonempty);
    build(title, link, body, published)
}

fn atom_entry(entry: &Element) -> Option<FeedDocument> {
    let title = entry
        .child("title")
        .map(|e| strip_markup(&e.text()))
        .unwrap_or_default();
    let link = entry
        .elements()
        .filter(|e| e.name == "link")
        .find(|e| matches!(e.attr("rel"), None | Some("alternate")))
        .and_then(|e| e.attr("href"))
        .map(|h| h.trim().to_string())
        .unwrap_or_default();
    let body = entry
        .child("content")
        .or_else(|| entry.child("summary"))
        .map(|e| strip_markup(&e.text()))
        .and_then(nonempty);
    let published = entry
        .child("published")
        .or_else(|| entry.child("updated"))
        .map(|e| e.text().trim().to_string())
        .and_then(nonempty);
    build(title, link, body, published)
}

/// Parses an RSS 2.0 or Atom 1.0 document into articles.
///
/// Items or entries carrying neither a title nor a link are skipped.
pub fn parse_feed(bytes: &[u8]) -> Result<Vec<FeedDocument>, FeedError> {
    let bytes = bytes.strip_prefix(b"\xEF\xBB\xBF").unwrap_or(bytes);
    let text = std::str::from_utf8(bytes)
        .map_err(|e| FeedError::UnsupportedEncoding(format!("invalid UTF-8 ({e})")))?;
    let root = parse_tree(text)?;
    match root.name.as_str() {
        "rss" => Ok(root
            .elements()
            .filter(|e| e.name == "channel")
            .flat_map(|c| c.elements().filter(|e| e.name == "item"))
            .filter_map(rss_item)
            .collect()),
        "feed" => Ok(root
            .elements()
            .filter(|e| e.name == "entry")
            .filter_map(atom_entry)
            .collect()),
        other => Err(FeedError::UnrecognizedFeedRoot(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_rss() {
        let docs = parse_feed(
            b"<rss version=\"2.0\"><channel><item><title>A</title><link>https://x.org/a</link></item></channel></rss>",
        )
        .unwrap();
        assert_eq!(docs.len(), 1);
        assert_eq!(docs[0].title, "A");
        assert_eq!(docs[0].source_domain.as_deref(), Some("x.org"));
        assert_eq!(docs[0].body, None);
    }

    #[test]
    fn minimal_atom() {
        let xml = br#"<?xml version="1.0" encoding="utf-8"?>
<feed xmlns="http://www.w3.org/2005/Atom">
  <entry><title>One</title><link href="https://www.a.com/1"/></entry>
  <entry><title>Two</title><link rel="self" href="https://a.com/self"/><link rel="alternate" href="https://a.com/2"/></entry>
</feed>"#;
        let docs = parse_feed(xml).unwrap();
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[0].source_domain.as_deref(), Some("a.com"));
        assert_eq!(docs[1].link, "https://a.com/2");
    }

    #[test]
    fn not_xml() {
        assert!(matches!(
            parse_feed(b"not xml"),
            Err(FeedError::MalformedXml(_))
        ));
        assert!(matches!(parse_feed(b""), Err(FeedError::MalformedXml(_))));
        assert!(matches!(
            parse_feed(b"<rss><channel></rss>"),
            Err(FeedError::MalformedXml(_))
        ));
        assert!(matches!(
            parse_feed(b"<rss><channel>"),
            Err(FeedError::MalformedXml(_))
        ));
    }

    #[test]
    fn rdf_root_is_unrecognized() {
        let err = parse_feed(b"<rdf:RDF xmlns:rdf=\"x\"></rdf:RDF>").unwrap_err();
        assert_eq!(err, FeedError::UnrecognizedFeedRoot("RDF".into()));
    }

    #[test]
    fn non_utf8_declaration_rejected() {
        let err = parse_feed(b"<?xml version=\"1.0\" encoding=\"ISO-8859-1\"?><rss/>").unwrap_err();
        assert!(matches!(err, FeedError::UnsupportedEncoding(_)));
    }

    #[test]
    fn body_markup_is_stripped() {
        let xml = b"<rss><channel><item><title>Tom &amp; Jerry</title><link>http://n.com/x</link>\
            <description>&lt;p&gt;Hello &amp;amp; &lt;b&gt;world&lt;/b&gt;&amp;nbsp;!&lt;/p&gt;</description></item></channel></rss>";
        let docs = parse_feed(xml).unwrap();
        assert_eq!(docs[0].title, "Tom & Jerry");
        assert_eq!(docs[0].body.as_deref(), Some("Hello & world !"));
    }

    #[test]
    fn cdata_body() {
        let xml = b"<rss><channel><item><title>t</title><description><![CDATA[<p>AT&T <i>wins</i></p>]]></description></item></channel></rss>";
        let docs = parse_feed(xml).unwrap();
        assert_eq!(docs[0].body.as_deref(), Some("AT&T wins"));
        assert_eq!(docs[0].source_domain, None);
    }

    #[test]
    fn entries_without_title_or_link_are_skipped() {
        let xml =
            b"<feed><entry><summary>x</summary></entry><entry><title>ok</title></entry></feed>";
        assert_eq!(parse_feed(xml).unwrap().len(), 1);
    }

    #[test]
    fn entity_decoding_is_lenient() {
        assert_eq!(
            decode_entities("a &amp; b &#233; &#x41; &bogus; &"),
            "a & b é A &bogus; &"
        );
    }
}
