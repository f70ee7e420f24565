//! Deterministic synthetic corpus used by tests, benchmarks and demos.

use chrono::{Duration, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::db::IngestRecord;
use crate::model::{IncidentNumber, ReportDraft, TagDefinition, TaxonomyNamespace};

pub const DEFAULT_SEED: u64 = 0x1D_B0_2021;
pub const DEFAULT_REPORTS: usize = 1_000;
pub const DEFAULT_INCIDENTS: u32 = 120;
/// Incident 3 is always generated with this many reports.
pub const INCIDENT_THREE_REPORTS: usize = 18;

const SOURCES: &[(&str, &str)] = &[
    ("The Verge", "theverge.com"),
    ("Wired", "wired.com"),
    ("The Guardian", "theguardian.com"),
    ("BBC News", "bbc.co.uk"),
    ("Reuters", "reuters.com"),
    ("The New York Times", "nytimes.com"),
    ("The Washington Post", "washingtonpost.com"),
    ("Ars Technica", "arstechnica.com"),
    ("TechCrunch", "techcrunch.com"),
    ("MIT Technology Review", "technologyreview.com"),
    ("Bloomberg", "bloomberg.com"),
    ("ProPublica", "propublica.org"),
    ("Vice", "vice.com"),
    ("Engadget", "engadget.com"),
    ("CNN", "cnn.com"),
    ("Forbes", "forbes.com"),
    ("The Atlantic", "theatlantic.com"),
    ("Le Monde", "lemonde.fr"),
    ("Der Spiegel", "spiegel.de"),
    ("Nature", "nature.com"),
    ("IEEE Spectrum", "spectrum.ieee.org"),
    ("Quartz", "qz.com"),
    ("ZDNet", "zdnet.com"),
    ("Business Insider", "businessinsider.com"),
];

const AUTHORS: &[&str] = &[
    "Ada Whitfield", "Bilal Haddad", "Carmen Ortiz", "Dmitri Volkov", "Esi Mensah",
    "Farah Qureshi", "Gustavo Lima", "Hana Sato", "Ivan Petrov", "Jamal Carter",
    "Kirsten Berg", "Lena Fischer", "Mateo Rossi", "Nadia Rahman", "Oren Levi",
    "Priya Nair", "Quentin Moreau", "Rosa Delgado", "Samir Aziz", "Tamsin Clarke",
    "Uma Iyer", "Viktor Novak", "Wen Zhao", "Ximena Cruz", "Yusuf Demir",
    "Zara Ahmed", "Alan Brooks", "Beatriz Costa", "Chen Wei", "Dana Kowalski",
    "Elif Kaya", "Femi Adeyemi", "Greta Lund", "Hugo Martin", "Ines Duarte",
    "Jonas Weber", "Keiko Tanaka", "Luca Bianchi", "Maya Singh", "Noah Fitzgerald",
];

const SUBMITTERS: &[&str] = &[
    "Roman Yampolskiy", "Sean McGregor", "Catherine Olsson", "Patrick Hall",
    "Anonymous", "Jingying Yang", "Khoa Lam", "Kate Perkins", "Daniel Atherton",
    "Zachary Arnold", "Nick Bell", "Ingrid Dickinson", "Helen Toner", "Lara Martin",
    "Sam Yoon", "Marta Nowak", "Theo Grant", "Vera Okafor", "Will Harding", "Yasmin Farouk",
];

struct Topic {
    headline: &'static str,
    system: &'static [&'static str],
    harm: &'static [&'static str],
    setting: &'static [&'static str],
    fairness: &'static str,
    industry: &'static str,
}

const TOPICS: &[Topic] = &[
    Topic {
        headline: "Facial recognition misidentifies shoppers",
        system: &["facial recognition system", "face matching software", "biometric camera network"],
        harm: &["misidentified innocent people", "flagged the wrong person", "produced false matches"],
        setting: &["retail stores", "city streets", "shopping centers"],
        fairness: "Bias",
        industry: "Retail",
    },
    Topic {
        headline: "Translation app mangles asylum interview",
        system: &["machine translation service", "translate feature", "automatic translation tool"],
        harm: &["mistranslated key testimony", "translated a greeting as a threat", "garbled legal terms"],
        setting: &["immigration hearings", "border interviews", "social media posts"],
        fairness: "Accessibility",
        industry: "Government",
    },
    Topic {
        headline: "Autonomous vehicle strikes pedestrian",
        system: &["self-driving car", "autonomous vehicle", "driver assistance software"],
        harm: &["failed to brake for a pedestrian", "misclassified a cyclist", "crashed into a barrier"],
        setting: &["public roads", "a highway at night", "a suburban crosswalk"],
        fairness: "Safety",
        industry: "Transportation",
    },
    Topic {
        headline: "Chatbot learns offensive language from users",
        system: &["conversational chatbot", "social media bot", "dialogue agent"],
        harm: &["posted offensive messages", "repeated hateful slogans", "was manipulated by trolls"],
        setting: &["a public messaging platform", "online forums", "a launch event"],
        fairness: "Bias",
        industry: "Media",
    },
    Topic {
        headline: "Predictive policing tool targets neighborhoods",
        system: &["predictive policing algorithm", "crime forecasting model", "patrol allocation software"],
        harm: &["concentrated patrols in minority neighborhoods", "reinforced historical arrest patterns", "amplified biased data"],
        setting: &["police departments", "city councils", "urban districts"],
        fairness: "Bias",
        industry: "Law Enforcement",
    },
    Topic {
        headline: "Hiring algorithm penalizes applicants",
        system: &["resume screening model", "hiring algorithm", "recruiting software"],
        harm: &["downgraded resumes from women", "rejected qualified applicants", "learned discriminatory patterns"],
        setting: &["corporate recruiting", "job platforms", "technical hiring"],
        fairness: "Bias",
        industry: "Employment",
    },
    Topic {
        headline: "Content moderation system removes news footage",
        system: &["content moderation classifier", "automated takedown system", "video filtering model"],
        harm: &["removed documentary evidence", "censored news footage", "blocked legitimate posts"],
        setting: &["video platforms", "social networks", "news archives"],
        fairness: "Accountability",
        industry: "Media",
    },
    Topic {
        headline: "Medical model recommends unsafe treatment",
        system: &["clinical decision support tool", "diagnostic model", "treatment recommendation engine"],
        harm: &["recommended unsafe treatment", "missed critical diagnoses", "underestimated patient risk"],
        setting: &["hospitals", "oncology clinics", "emergency rooms"],
        fairness: "Safety",
        industry: "Healthcare",
    },
    Topic {
        headline: "Voice assistant records private conversations",
        system: &["voice assistant", "smart speaker", "speech recognition service"],
        harm: &["recorded private conversations", "sent audio to the wrong contact", "activated without a wake word"],
        setting: &["family homes", "offices", "hotel rooms"],
        fairness: "Privacy",
        industry: "Consumer Electronics",
    },
    Topic {
        headline: "Credit scoring model denies loans",
        system: &["credit scoring model", "loan approval algorithm", "underwriting software"],
        harm: &["offered lower credit limits to women", "denied loans unfairly", "could not explain rejections"],
        setting: &["consumer banking", "credit card applications", "mortgage lending"],
        fairness: "Bias",
        industry: "Finance",
    },
    Topic {
        headline: "Recommendation engine promotes harmful videos",
        system: &["recommendation engine", "autoplay algorithm", "personalized feed ranking"],
        harm: &["promoted disturbing videos to children", "amplified conspiracy content", "created filter bubbles"],
        setting: &["children's channels", "streaming services", "news feeds"],
        fairness: "Safety",
        industry: "Media",
    },
    Topic {
        headline: "Warehouse robot injures worker",
        system: &["warehouse robot", "industrial robotic arm", "automated picking system"],
        harm: &["injured a worker", "punctured a can of bear repellent", "collided with staff"],
        setting: &["fulfillment centers", "factory floors", "distribution warehouses"],
        fairness: "Safety",
        industry: "Logistics",
    },
    Topic {
        headline: "Image classifier applies offensive labels",
        system: &["image classifier", "photo tagging feature", "computer vision model"],
        harm: &["applied offensive labels to photos", "mislabeled people", "failed on darker skin tones"],
        setting: &["photo apps", "online albums", "cloud services"],
        fairness: "Bias",
        industry: "Consumer Electronics",
    },
    Topic {
        headline: "Deepfake video spreads political misinformation",
        system: &["deepfake generator", "synthetic video model", "voice cloning tool"],
        harm: &["spread political misinformation", "impersonated an executive", "fooled viewers"],
        setting: &["election campaigns", "corporate phone calls", "viral videos"],
        fairness: "Accountability",
        industry: "Government",
    },
    Topic {
        headline: "Exam grading algorithm downgrades students",
        system: &["exam grading algorithm", "proctoring software", "automated essay scorer"],
        harm: &["downgraded students from poorer schools", "flagged students as cheating", "misgraded essays"],
        setting: &["secondary schools", "university admissions", "remote exams"],
        fairness: "Bias",
        industry: "Education",
    },
];

const FILLER: &[&str] = &[
    "Researchers who reviewed the deployment said the failure was predictable.",
    "The company said it was investigating the incident and would update its systems.",
    "Critics argued that the developers had not tested the model on realistic data.",
    "Officials declined to comment on how long the software had been in use.",
    "Internal documents suggest engineers raised concerns months before the launch.",
    "Advocacy groups called for an independent audit of the technology.",
    "The vendor disputed the findings but agreed to pause the rollout.",
    "Several experts noted that similar problems had been reported elsewhere.",
    "Users described the experience as confusing and, at times, frightening.",
    "Regulators have opened an inquiry into whether any laws were broken.",
    "An analysis of the training data revealed gaps that explain the behavior.",
    "The episode renewed debate about accountability for automated decisions.",
    "Engineers later traced the problem to a change in the input pipeline.",
    "Lawmakers cited the case during hearings on artificial intelligence oversight.",
    "The organization published a statement promising more human review.",
    "Observers said the system had been marketed as accurate and reliable.",
    "A spokesperson said fewer than one percent of cases were affected.",
    "Documents obtained by reporters show the issue was logged internally.",
    "Affected people said they were never told an algorithm was involved.",
    "The incident joins a growing list of failures involving machine learning.",
];

const EXTRA_WORDS: &[&str] = &[
    "dataset", "benchmark", "audit", "transparency", "oversight", "lawsuit",
    "accuracy", "calibration", "deployment", "vendor", "contract", "pilot",
    "regulation", "complaint", "investigation", "whistleblower", "apology",
    "rollback", "update", "patch", "evaluation", "testing", "monitoring",
];

/// A generated corpus in ingest order: incident numbers first appear in
/// ascending order.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub records: Vec<IngestRecord>,
    pub incident_topics: Vec<usize>,
}

impl Corpus {
    pub fn incident_count(&self) -> u32 {
        self.incident_topics.len() as u32
    }

    pub fn to_jsonl(&self) -> String {
        self.records
            .iter()
            .map(|r| serde_json::to_string(r).expect("records serialize") + "\n")
            .collect()
    }
}

fn incident_sizes(rng: &mut ChaCha8Rng, reports: usize, incidents: u32) -> Vec<usize> {
    assert!(incidents >= 3, "need at least three incidents");
    assert!(
        reports >= INCIDENT_THREE_REPORTS + incidents as usize - 1,
        "too few reports for the incident count"
    );
    let mut sizes: Vec<usize> = (0..incidents)
        .map(|i| if i == 2 { INCIDENT_THREE_REPORTS } else { rng.gen_range(1..=16) })
        .collect();
    let mut total: usize = sizes.iter().sum();
    while total != reports {
        let i = rng.gen_range(0..sizes.len());
        if i == 2 {
            continue;
        }
        if total < reports {
            sizes[i] += 1;
            total += 1;
        } else if sizes[i] > 1 {
            sizes[i] -= 1;
            total -= 1;
        }
    }
    sizes
}

fn pick<'a>(rng: &mut ChaCha8Rng, items: &[&'a str]) -> &'a str {
    items.choose(rng).expect("non-empty pool")
}

fn paragraph(rng: &mut ChaCha8Rng, topic: &Topic, place: &str, year: i32) -> String {
    let mut sentences = vec![
        format!(
            "A {} used in {} {} in {year}, according to people familiar with the matter.",
            pick(rng, topic.system),
            place,
            pick(rng, topic.harm)
        ),
        format!(
            "The {} reportedly {} while operating in {}.",
            pick(rng, topic.system),
            pick(rng, topic.harm),
            pick(rng, topic.setting)
        ),
    ];
    for _ in 0..rng.gen_range(2..=4) {
        sentences.push(pick(rng, FILLER).to_string());
    }
    let extra: Vec<&str> = (0..3).map(|_| pick(rng, EXTRA_WORDS)).collect();
    sentences.push(format!("Key issues include {}, {} and {}.", extra[0], extra[1], extra[2]));
    sentences.shuffle(rng);
    sentences.join(" ")
}

fn body(rng: &mut ChaCha8Rng, topic: &Topic, place: &str, year: i32) -> String {
    let mut text = String::new();
    while text.len() < 1_900 {
        if !text.is_empty() {
            text.push_str("\n\n");
        }
        text.push_str(&paragraph(rng, topic, place, year));
    }
    text
}

const PLACES: &[&str] = &[
    "Detroit", "London", "Phoenix", "Mumbai", "Toronto", "Berlin", "Sydney",
    "Chicago", "Paris", "Seoul", "Lagos", "Tempe", "Oakland", "Madrid", "Nairobi",
];

/// Generates `reports` reports spread over `incidents` incidents.
pub fn generate(seed: u64, reports: usize, incidents: u32) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sizes = incident_sizes(&mut rng, reports, incidents);
    let mut records = Vec::with_capacity(reports);
    let mut incident_topics = Vec::with_capacity(sizes.len());
    let epoch = NaiveDate::from_ymd_opt(2015, 1, 1).expect("valid date");
    let mut serial = 0usize;
    for (i, &size) in sizes.iter().enumerate() {
        let number = IncidentNumber(i as u32 + 1);
        let topic_index = if i == 2 { 0 } else { rng.gen_range(0..TOPICS.len()) };
        incident_topics.push(topic_index);
        let topic = &TOPICS[topic_index];
        let place = pick(&mut rng, PLACES);
        let incident_date = epoch + Duration::days(rng.gen_range(0..2_400));
        for j in 0..size {
            serial += 1;
            let (source, domain) = SOURCES[rng.gen_range(0..SOURCES.len())];
            let published = incident_date + Duration::days(rng.gen_range(0..60));
            let year = incident_date.format("%Y").to_string().parse().unwrap_or(2020);
            let title = format!("{} in {place}", topic.headline);
            let title = if j % 3 == 1 {
                format!("{title}: what went wrong")
            } else if j % 3 == 2 {
                format!("Report: {}", title.to_lowercase())
            } else {
                title
            };
            let author_count = rng.gen_range(1..=2);
            let mut authors: Vec<String> = Vec::new();
            while authors.len() < author_count {
                let a = pick(&mut rng, AUTHORS).to_string();
                if !authors.contains(&a) {
                    authors.push(a);
                }
            }
            let submitter = if j == 0 && i % 5 == 0 {
                SUBMITTERS[0]
            } else {
                pick(&mut rng, SUBMITTERS)
            };
            records.push(IngestRecord {
                incident_number: number,
                draft: ReportDraft {
                    title,
                    text: body(&mut rng, topic, place, year),
                    url: format!("https://www.{domain}/{}/{}-{serial}", published.format("%Y/%m"), slug(topic.headline)),
                    source: source.to_string(),
                    authors,
                    submitters: vec![submitter.to_string()],
                    date_published: published,
                    date_submitted: Some(published + Duration::days(rng.gen_range(1..400))),
                    incident_date: (j == 0 || rng.gen_bool(0.3)).then_some(incident_date),
                },
            });
        }
    }
    Corpus {
        records,
        incident_topics,
    }
}

fn slug(s: &str) -> String {
    s.to_lowercase()
        .split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|w| !w.is_empty())
        .collect::<Vec<_>>()
        .join("-")
}

/// The standard 1,000-report corpus.
pub fn default_corpus() -> Corpus {
    generate(DEFAULT_SEED, DEFAULT_REPORTS, DEFAULT_INCIDENTS)
}

fn namespace(name: &str, owner: &str, description: &str, tags: &[&str]) -> TaxonomyNamespace {
    TaxonomyNamespace {
        name: name.into(),
        owner: owner.into(),
        description: description.into(),
        tags: tags
            .iter()
            .map(|t| TagDefinition {
                name: t.to_string(),
                description: String::new(),
            })
            .collect(),
    }
}

/// Two independent taxonomies over the same incidents.
pub fn taxonomies() -> Vec<TaxonomyNamespace> {
    vec![
        namespace(
            "Fairness",
            "Civil Society Coalition",
            "Which fairness concern the incident raises.",
            &["Bias", "Privacy", "Safety", "Accountability", "Accessibility"],
        ),
        namespace(
            "Industry",
            "Sector Analysts",
            "Sector in which the system was deployed.",
            &[
                "Retail", "Government", "Transportation", "Media", "Law Enforcement",
                "Employment", "Healthcare", "Consumer Electronics", "Finance", "Logistics", "Education",
            ],
        ),
    ]
}

/// One line of a classification file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassificationRecord {
    pub incident_number: IncidentNumber,
    pub namespace: String,
    pub tag: String,
    pub classifier: String,
}

/// Classifies every incident in both taxonomies according to its topic.
pub fn classifications(corpus: &Corpus) -> Vec<ClassificationRecord> {
    let mut out = Vec::new();
    for (i, &topic) in corpus.incident_topics.iter().enumerate() {
        let n = IncidentNumber(i as u32 + 1);
        let topic = &TOPICS[topic];
        out.push(ClassificationRecord {
            incident_number: n,
            namespace: "Fairness".into(),
            tag: topic.fairness.into(),
            classifier: "Civil Society Coalition".into(),
        });
        out.push(ClassificationRecord {
            incident_number: n,
            namespace: "Industry".into(),
            tag: topic.industry.into(),
            classifier: "Sector Analysts".into(),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn default_corpus_shape() {
        let corpus = default_corpus();
        assert_eq!(corpus.records.len(), DEFAULT_REPORTS);
        let incidents: BTreeSet<_> = corpus.records.iter().map(|r| r.incident_number).collect();
        assert!(incidents.len() >= 100);
        let sources: BTreeSet<_> = corpus.records.iter().map(|r| &r.draft.source).collect();
        assert!(sources.len() >= 20);
        let three = corpus.records.iter().filter(|r| r.incident_number == IncidentNumber(3)).count();
        assert_eq!(three, INCIDENT_THREE_REPORTS);
        let mean = corpus.records.iter().map(|r| r.draft.text.len()).sum::<usize>() / DEFAULT_REPORTS;
        assert!((1_900..2_600).contains(&mean), "mean body length {mean}");
        let urls: BTreeSet<_> = corpus.records.iter().map(|r| &r.draft.url).collect();
        assert_eq!(urls.len(), DEFAULT_REPORTS);
    }

    #[test]
    fn generation_is_deterministic() {
        assert_eq!(generate(7, 50, 10).to_jsonl(), generate(7, 50, 10).to_jsonl());
        assert_ne!(generate(7, 50, 10).to_jsonl(), generate(8, 50, 10).to_jsonl());
    }

    #[test]
    fn classifications_use_defined_tags() {
        let corpus = generate(1, 40, 8);
        let taxonomies = taxonomies();
        for c in classifications(&corpus) {
            let ns = taxonomies.iter().find(|t| t.name == c.namespace).unwrap();
            assert!(ns.has_tag(&c.tag), "{}:{}", c.namespace, c.tag);
        }
    }
}
