#include "newslens/extraction.hpp"

namespace newslens::extraction {

// Prompt bodies. Placeholders are {name}; literal braces are doubled. The
// response field names and allowed values are load-bearing: parse_and_validate
// checks records against exactly these schemas.

namespace {

const char* kP1Text = R"(You are an extraction agent for conflict-news analysis. Read the news
article below and list every instance of a human entity experiencing a
hardship connected to the Israel-Palestine conflict.

An instance is either:
- Individualized: the hardship of one singled-out person, family, or couple
  (named or unnamed, but singular).
- Grouped: the hardship of multiple people described collectively, including
  casualty statistics and broad event descriptions.

Count hardships that are emotional (severe), war-related, or physical, whether
stated directly or implied. Harm a person inflicts on others is not that
person's hardship. Include instances mentioned in passing; a sentence may
contain several instances. Treat photo captions as article text.

Respond only with JSON in this exact shape:
{{"instances":[{{"Type":"...","Entity":"...","Side":"...","Civilian_Status":"...","Location":"...","Primary":"...","Quoted":"...","Phrases":"..."}}]}}

Field rules:
- Type: "Individualized" or "Grouped".
- Entity: the entity's identifier verbatim from the article.
- Side: "Palestine", "Israel", "Both" or "Other" - the side the entity
  belongs to or sympathizes with.
- Civilian_Status: "Military", "Government" or "Civilian". Hostages and
  captives count as "Civilian"; Hamas or IDF members never do.
- Location: where the hardship happened - "Israel", "Gaza", "West Bank" or
  "Other".
- Primary: for Individualized instances, "Yes" when the entity is the central
  figure whose narrative does not branch from another entity's story,
  otherwise "No". For Grouped instances always "N_A".
- Quoted: for Grouped instances, "Yes" when the instance sits inside a direct
  quotation, otherwise "No". For Individualized instances always "N_A".
- Phrases: the part of the sentence, verbatim, where the entity and the
  hardship both appear.

If the article contains no instances at all, return:
{{"instances":[{{"Type":"N_A","Entity":"N_A","Side":"N_A","Civilian_Status":"N_A","Location":"N_A","Primary":"N_A","Quoted":"N_A","Phrases":"N_A"}}]}}

Article:
{article})";

const char* kP2Text = R"(You are a labeling agent for conflict-news analysis. Below you get a news
article, the identifier of one individual mentioned in it, and an excerpt
phrase where that individual appears. Collect the individual's story: every
sentence in the article that mentions the individual or their hardships. Then
label the single most severe hardship appearing anywhere in that story, even
when someone other than the individual experiences it.

Allowed hardship labels: "Casualties", "Displacement and Refugees",
"Imprisonment and Detention", "Health and Medical Conditions", "Deprivation,
Malnutrition and Hunger", "Humanitarian Aid and Dependence", "Missing",
"Vulnerable and Affected Groups", "Other Hardship". Exception: when the most
severe hardship in the story is one the individual inflicts on others, return
"Inflicted upon others" instead.

Also decide whether the story's hardship is directly tied to the October 7
attack or its hostages (count only Israeli victims and hostages of that
attack).

Respond only with JSON in this exact shape:
{{"instances":[{{"Hardship":"...","Justify":"...","Oct_7_Attack":"..."}}]}}

- Hardship: one allowed label.
- Justify: one brief sentence for the label choice.
- Oct_7_Attack: "Yes" or "No".

Individual's identifier: {identifier}
Phrase: {story_phrases}
Article:
{article})";

const char* kP3Text = R"(You are a labeling agent for conflict-news analysis. Below you get a news
article, an entity identifier, the entity type ("Individualized" for one
person/family/couple, "Grouped" for a collective), and an excerpt phrase
where the entity appears.

For an Individualized entity, collect the entity's story (every article
sentence mentioning the entity or their hardships) and report the term used
where a child is mentioned in that story, if any. For a Grouped entity,
report the entity identifier itself when it explicitly refers to children.
A child is a person under 18; check stated ages. The mention must be
explicit - never infer one.

Respond only with JSON in this exact shape:
{{"instances":[{{"Is_Child":"..."}}]}}

- Is_Child: the verbatim term referring to the child(ren), or "N_A" when the
  story mentions none.

Entity identifier: {identifier}
Entity type: {entity_type}
Phrase: {phrase}
Article:
{article})";

const char* kCvnExtractText = R"(Scan the article below for every place where numbers or statistics describe
actions affecting civilians - adults or children - such as killing, wounding,
displacing, kidnapping, or depriving them of food, water or shelter. Numbers
may be digits or words, and may be open ranges ("more than 100"). Report only
instances with an explicit quantity; skip singular counts like "once" or
"twice". Rescan the article once to catch missed instances.

Context: on 2023-10-07 Hamas attacked Israel and took hostages back to Gaza;
hostages mentioned without nationality are the Israeli ones, even with dual
citizenship. Hamas and Gaza are Palestinian.

Respond only with JSON in this exact shape:
{{"instances":[{{"Keyword":"...","Statistics":"...","Statistics Type":"...","Association":"...","Is Child":"...","Is Human":"...","Group Size":"...","Nationality":"...","Side":"...","Sentence":"..."}}]}}

Field rules:
- Keyword: the phrase that triggered the detection.
- Statistics: the detected number for affected civilians.
- Statistics Type: a specific type such as "Statistics About Deaths",
  "Number About Injured", "Age", "Date", "Duration"; never a generic label.
- Association: your best guess of who the number is about.
- Is Child: "Yes" when the number concerns one or more children, else "No".
- Is Human: "Yes" only when the statistic counts humans (dead or alive);
  ages and durations are "No".
- Group Size: "Singular", "Double" or "Many" (3+) when Is Human is "Yes",
  otherwise "Not_Applicable".
- Nationality: your best guess for the affected people.
- Side: "Palestine", "Israel", "Both" or "Other" - the side the affected
  people belong to or are associated with by context.
- Sentence: the part of the sentence containing the keyword.

Article:
{article})";

const char* kCvnCitationText = R"(The sentence below, delimited by double brackets, reports a number about a
civilian victim. Decide whether that number is attributed to a source within
the sentence. The Statistics field tells you which number to check and the
Association field tells you whose number it is; use both when the sentence
contains several numbers.

Respond only with JSON in this exact shape:
{{"instances":[{{"Cited":"...","Citing_Source":"...","Phrase":"..."}}]}}

- Cited: "Yes" or "No".
- Citing_Source: the source credited with the number, or "N_A" when Cited is
  "No".
- Phrase: the verbatim citing phrase, or "N_A" when Cited is "No".

Statistics: {statistics}
Association: {association}
Sentence: [[{sentence}]])";

const char* kCvnDoubtText = R"(Context: the sentence below, delimited by double square brackets, comes from
news coverage of the Israel-Hamas war and reports numbers of civilian
casualties. Return the verbatim phrases, if any, with which the author casts
doubt on the reported number - either by undermining the credibility of the
source providing it or by hedging the number itself. Plain approximation
("more than 34,000") is not doubt; do not report it.

Respond only with JSON in this exact shape:
{{"instances":[{{"Keyword":"...","Justification":"...","Side":"...","Src":"...","Sentence":"..."}}]}}

- Keyword: the doubt-casting phrase, verbatim.
- Justification: one brief sentence on how it casts doubt.
- Side: "Palestine", "Israel" or "Other" - the side whose number is doubted.
- Src: the source reporting the number, verbatim.
- Sentence: the part of the sentence containing the phrase.

Sentence: [[{sentence}]])";

const char* kHeartVividnessText = R"(You rate narrative style in news stories about people affected by war. Rate
how vividly the story below expresses emotions: 1 when emotional expressions
are absent or flat, 2 when somewhat vivid, 3 when extremely vivid.

Respond only with JSON in this exact shape:
{{"instances":[{{"Rating":"..."}}]}}

- Rating: "1", "2" or "3".

Story:
{story})";

const char* kHeartPlotVolumeText = R"(You rate narrative style in news stories about people affected by war. Rate
the story below on plot volume - how many events happen and how significant
they are: 1 when little happens, 2 for a moderate amount, 3 when the story is
dense with significant events.

Respond only with JSON in this exact shape:
{{"instances":[{{"Rating":"..."}}]}}

- Rating: "1", "2" or "3".

Story:
{story})";

std::vector<std::string> yes_no() { return {"Yes", "No"}; }
std::vector<std::string> yes_no_na() { return {"Yes", "No", "N_A"}; }

PromptTemplate make_p1() {
    PromptTemplate t;
    t.id = PromptId::P1Instances;
    t.template_text = kP1Text;
    t.root_field = "instances";
    t.response_schema = {
        {"Type", {"Individualized", "Grouped", "N_A"}},
        {"Entity", {}},
        {"Side", {"Palestine", "Israel", "Both", "Other", "N_A"}},
        {"Civilian_Status", {"Military", "Government", "Civilian", "N_A"}},
        {"Location", {"Israel", "Gaza", "West Bank", "Other", "N_A"}},
        {"Primary", yes_no_na()},
        {"Quoted", yes_no_na()},
        {"Phrases", {}},
    };
    return t;
}

PromptTemplate make_p2() {
    PromptTemplate t;
    t.id = PromptId::P2Hardship;
    t.template_text = kP2Text;
    t.root_field = "instances";
    t.response_schema = {
        {"Hardship",
         {"Casualties", "Displacement and Refugees", "Imprisonment and Detention",
          "Health and Medical Conditions", "Deprivation, Malnutrition and Hunger",
          "Deprivation Malnutrition and Hunger", "Humanitarian Aid and Dependence", "Missing",
          "Vulnerable and Affected Groups", "Other Hardship", "Inflicted upon others"}},
        {"Justify", {}},
        {"Oct_7_Attack", yes_no()},
    };
    return t;
}

PromptTemplate make_p3() {
    PromptTemplate t;
    t.id = PromptId::P3Child;
    t.template_text = kP3Text;
    t.root_field = "instances";
    t.response_schema = {{"Is_Child", {}}};
    return t;
}

PromptTemplate make_cvn_extract() {
    PromptTemplate t;
    t.id = PromptId::CvnExtract;
    t.template_text = kCvnExtractText;
    t.root_field = "instances";
    t.response_schema = {
        {"Keyword", {}},
        {"Statistics", {}},
        {"Statistics Type", {}},
        {"Association", {}},
        {"Is Child", yes_no()},
        {"Is Human", yes_no()},
        {"Group Size", {"Singular", "Double", "Many", "Not_Applicable"}},
        {"Nationality", {}},
        {"Side", {"Palestine", "Israel", "Both", "Other"}},
        {"Sentence", {}},
    };
    return t;
}

PromptTemplate make_cvn_citation() {
    PromptTemplate t;
    t.id = PromptId::CvnCitation;
    t.template_text = kCvnCitationText;
    t.root_field = "instances";
    t.response_schema = {
        {"Cited", yes_no()},
        {"Citing_Source", {}},
        {"Phrase", {}},
    };
    return t;
}

PromptTemplate make_cvn_doubt() {
    PromptTemplate t;
    t.id = PromptId::CvnDoubt;
    t.template_text = kCvnDoubtText;
    t.root_field = "instances";
    t.response_schema = {
        {"Keyword", {}},
        {"Justification", {}},
        {"Side", {"Palestine", "Israel", "Other"}},
        {"Src", {}},
        {"Sentence", {}},
    };
    return t;
}

PromptTemplate make_heart(PromptId id) {
    PromptTemplate t;
    t.id = id;
    t.template_text = (id == PromptId::HeartVividness) ? kHeartVividnessText : kHeartPlotVolumeText;
    t.root_field = "instances";
    t.response_schema = {{"Rating", {"1", "2", "3"}}};
    return t;
}

}  // namespace

const PromptTemplate& prompt_registry(PromptId id) {
    static const PromptTemplate p1 = make_p1();
    static const PromptTemplate p2 = make_p2();
    static const PromptTemplate p3 = make_p3();
    static const PromptTemplate cvn = make_cvn_extract();
    static const PromptTemplate citation = make_cvn_citation();
    static const PromptTemplate doubt = make_cvn_doubt();
    static const PromptTemplate vividness = make_heart(PromptId::HeartVividness);
    static const PromptTemplate plot = make_heart(PromptId::HeartPlotVolume);
    switch (id) {
        case PromptId::P1Instances: return p1;
        case PromptId::P2Hardship: return p2;
        case PromptId::P3Child: return p3;
        case PromptId::CvnExtract: return cvn;
        case PromptId::CvnCitation: return citation;
        case PromptId::CvnDoubt: return doubt;
        case PromptId::HeartVividness: return vividness;
        case PromptId::HeartPlotVolume: return plot;
    }
    return p1;
}

const char* prompt_id_name(PromptId id) {
    switch (id) {
        case PromptId::P1Instances: return "P1_instances";
        case PromptId::P2Hardship: return "P2_hardship";
        case PromptId::P3Child: return "P3_child";
        case PromptId::CvnExtract: return "CVN_extract";
        case PromptId::CvnCitation: return "CVN_citation";
        case PromptId::CvnDoubt: return "CVN_doubt";
        case PromptId::HeartVividness: return "HEART_vividness";
        case PromptId::HeartPlotVolume: return "HEART_plot_volume";
    }
    return "P1_instances";
}

std::optional<PromptId> parse_prompt_id(std::string_view s) {
    if (s == "P1_instances") return PromptId::P1Instances;
    if (s == "P2_hardship") return PromptId::P2Hardship;
    if (s == "P3_child") return PromptId::P3Child;
    if (s == "CVN_extract") return PromptId::CvnExtract;
    if (s == "CVN_citation") return PromptId::CvnCitation;
    if (s == "CVN_doubt") return PromptId::CvnDoubt;
    if (s == "HEART_vividness") return PromptId::HeartVividness;
    if (s == "HEART_plot_volume") return PromptId::HeartPlotVolume;
    return std::nullopt;
}

}  // namespace newslens::extraction
