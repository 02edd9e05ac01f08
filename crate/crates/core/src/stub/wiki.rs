//! In-memory MediaWiki that answers the handful of Action API queries the
//! corpus miner sends.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde_json::{json, Value};

use super::{StubRequest, StubResponse, StubServer};

#[derive(Debug, Clone, Default)]
pub struct StubWiki {
    pages: BTreeMap<String, (String, Vec<String>)>,
    categories: BTreeMap<String, (Vec<String>, Vec<String>)>,
    search: BTreeMap<String, Vec<String>>,
}

impl StubWiki {
    pub fn new() -> Self {
        StubWiki::default()
    }

    pub fn page(mut self, title: &str, text: &str, categories: &[&str]) -> Self {
        self.pages.insert(
            title.to_string(),
            (text.to_string(), categories.iter().map(|c| c.to_string()).collect()),
        );
        self
    }

    pub fn category(mut self, name: &str, pages: &[&str], subcats: &[&str]) -> Self {
        self.categories.insert(
            name.to_string(),
            (
                pages.iter().map(|p| p.to_string()).collect(),
                subcats.iter().map(|c| c.to_string()).collect(),
            ),
        );
        self
    }

    /// Results for a search, matched case-insensitively on the whole query.
    pub fn search_result(mut self, query: &str, titles: &[&str]) -> Self {
        self.search.insert(
            query.to_lowercase(),
            titles.iter().map(|t| t.to_string()).collect(),
        );
        self
    }

    /// Two searchable articles, one category level with a subcategory, and
    /// a second level below that.
    ///
    /// | depth | articles |
    /// |---|---|
    /// | 0 | Rail transport, Level crossing |
    /// | 1 | + Train, Rail freight transport, Railway track, Railway signalling |
    /// | 2 | + Viaduct |
    pub fn rail() -> Self {
        StubWiki::new()
            .search_result("rail transport", &["Rail transport", "Train"])
            .search_result("level crossing", &["Level crossing"])
            .page(
                "Rail transport",
                "Rail transport is a means of transport using wheeled vehicles running on rails. \
                 Trains carry passengers and freight between stations. Signalling keeps trains apart.",
                &["Category:Rail transport"],
            )
            .page(
                "Level crossing",
                "A level crossing is an intersection where a railway line crosses a road. \
                 Barriers and warning lights protect road users when a train approaches.",
                &["Category:Rail infrastructure"],
            )
            .page(
                "Train",
                "A train is a series of connected vehicles that run along a railway track. \
                 Locomotives haul passenger coaches or freight wagons.",
                &["Category:Rail transport"],
            )
            .page(
                "Rail freight transport",
                "Rail freight transport is the use of railroads and trains to transport cargo. \
                 Intermodal containers and bulk wagons dominate freight traffic.",
                &["Category:Rail transport"],
            )
            .page(
                "Railway track",
                "The railway track consists of rails, fasteners, sleepers and ballast. \
                 Track gauge is the distance between the rails.",
                &["Category:Rail infrastructure"],
            )
            .page(
                "Railway signalling",
                "Railway signalling is a system used to direct railway traffic. \
                 Interlocking prevents conflicting routes and signals authorize train movements.",
                &["Category:Rail infrastructure"],
            )
            .page(
                "Viaduct",
                "A viaduct is a bridge composed of several spans crossing a valley. \
                 Masonry arches carried early railway viaducts.",
                &["Category:Railway bridges"],
            )
            .category(
                "Category:Rail transport",
                &["Rail transport", "Train", "Rail freight transport"],
                &["Category:Rail infrastructure"],
            )
            .category(
                "Category:Rail infrastructure",
                &["Level crossing", "Railway track", "Railway signalling"],
                &["Category:Railway bridges"],
            )
            .category("Category:Railway bridges", &["Viaduct"], &[])
    }

    fn answer(&self, req: &StubRequest) -> StubResponse {
        if req.path != "/w/api.php" {
            return StubResponse::status(404, "not found");
        }
        let q = |k: &str| req.query.get(k).map(String::as_str).unwrap_or_default();
        let limit = |k: &str| q(k).parse::<usize>().unwrap_or(usize::MAX);
        let body: Value = match (q("list"), q("prop")) {
            ("search", _) => {
                let hits: Vec<Value> = self
                    .search
                    .get(&q("srsearch").to_lowercase())
                    .into_iter()
                    .flatten()
                    .take(limit("srlimit"))
                    .map(|t| json!({"ns": 0, "title": t}))
                    .collect();
                json!({"batchcomplete": true, "query": {"search": hits}})
            }
            ("categorymembers", _) => {
                let (pages, subcats) = self.categories.get(q("cmtitle")).cloned().unwrap_or_default();
                let members: Vec<Value> = pages
                    .iter()
                    .map(|t| json!({"ns": 0, "title": t}))
                    .chain(subcats.iter().map(|t| json!({"ns": 14, "title": t})))
                    .take(limit("cmlimit"))
                    .collect();
                json!({"batchcomplete": true, "query": {"categorymembers": members}})
            }
            (_, "extracts") => {
                let title = q("titles");
                let page = match self.pages.get(title) {
                    Some((text, _)) => json!({"ns": 0, "title": title, "extract": text}),
                    None => json!({"ns": 0, "title": title, "missing": true}),
                };
                json!({"batchcomplete": true, "query": {"pages": [page]}})
            }
            (_, "categories") => {
                let title = q("titles");
                let page = match self.pages.get(title) {
                    Some((_, cats)) => json!({
                        "ns": 0,
                        "title": title,
                        "categories": cats.iter().map(|c| json!({"ns": 14, "title": c})).collect::<Vec<_>>(),
                    }),
                    None => json!({"ns": 0, "title": title, "missing": true}),
                };
                json!({"batchcomplete": true, "query": {"pages": [page]}})
            }
            _ => json!({"error": {"code": "badparams", "info": "unsupported query"}}),
        };
        StubResponse::json(&body)
    }

    pub fn serve(self) -> StubServer {
        let wiki = Arc::new(self);
        StubServer::start(Arc::new(move |req: &StubRequest| wiki.answer(req)))
            .expect("bind stub wiki on localhost")
    }
}
