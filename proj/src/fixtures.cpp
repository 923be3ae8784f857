#include "grammar/fixtures.hpp"

#include <array>
#include <cctype>
#include <filesystem>
#include <set>
#include <unordered_map>

#include <sqlite3.h>

#include "grammar/backend.hpp"
#include "grammar/error.hpp"
#include "grammar/prompts.hpp"

namespace grammar::fixtures {
namespace {

struct ClientRow {
    const char* name;
    const char* location;
    const char* industry;
    const char* contact;
};

const std::array<ClientRow, 10> kClients = {{
    {"Blue Horizon Hotels", "Maldives", "Hospitality", "Priya Raman"},
    {"Crestwood Apparel", "Toronto", "Retail", "Miguel Santos"},
    {"Deepvale Mining", "Perth", "Mining", "Harriet Walsh"},
    {"Eastgate Logistics", "Rotterdam", "Transportation", "Jonas Berg"},
    {"Fernleaf Organics", "Auckland", "Agriculture", "Tessa Clarke"},
    {"Glacier Point Media", "Oslo", "Entertainment", "Ruben Aas"},
    {"Ivory Coast Textiles", "Abidjan", "Manufacturing", "Awa Toure"},
    {"Juniper Labs", "Zurich", "Biotechnology", "Felix Brunner"},
    {"Kestrel Airways", "Dublin", "Aviation", "Niamh Byrne"},
    {"Lumen Energy", "Santiago", "Utilities", "Camila Rojas"},
}};

// Clients whose documents are missing from the deployment corpus.
const std::array<int, 2> kDoclessClients = {8, 9};

const std::array<const char*, 34> kEmployeeNames = {{
    "Alice Nguyen", "Marcus Webb",    "Sofia Marino",  "Omar Haddad",   "Ingrid Dahl",
    "Bram Visser",  "Chloe Durand",   "Dmitri Volkov", "Elena Petrova", "Farid Karimi",
    "Grace Okafor", "Hugo Lindqvist", "Isla Ferguson", "Jack Thornton", "Keiko Tanaka",
    "Liam Doyle",   "Mara Jovanovic", "Nils Bergman",  "Olga Smirnova", "Pablo Reyes",
    "Quinn Abbott", "Rosa Delgado",   "Samir Patel",   "Tara Whelan",   "Ursula Krause",
    "Viktor Horvat", "Wendy Chang",   "Xavier Leroy",  "Yara Nassif",   "Zoe Winters",
    "Anton Weiss",  "Bianca Rossi",   "Cormac Flynn",  "Delia Moraru",
}};

const std::array<const char*, 9> kJobTitles = {{
    "Structural Engineer", "Site Planner", "Quantity Surveyor", "Electrical Engineer",
    "Safety Officer", "Design Architect", "Geotechnical Analyst", "Procurement Lead",
    "Cost Estimator",
}};

const std::array<const char*, 6> kDepartments = {{
    "Engineering", "Design", "Operations", "Procurement", "Finance", "Safety",
}};

// Managers are deliberately not employees, so their names never collide with
// employee documents during retrieval.
const std::array<const char*, 6> kManagers = {{
    "Victor Hale", "Noor Rashid", "Petra Voss", "Gideon Marsh", "Lena Koval", "Stefan Brandt",
}};

// Employees whose documents are missing from the deployment corpus.
const std::array<int, 2> kDoclessEmployees = {32, 33};

struct ProjectRow {
    const char* name;
    const char* location;
    const char* start;
    const char* end;
    const char* client;
    const char* director;
};

const std::array<ProjectRow, 5> kProjects = {{
    {"Skyline Tower", "Melbourne", "2021-03-05", "2022-11-30", "Blue Horizon Hotels", "Alice Nguyen"},
    {"Harbor Gate", "Lisbon", "2020-07-14", "2021-09-02", "Eastgate Logistics", "Marcus Webb"},
    {"Cedar Ridge", "Denver", "2022-01-10", "2023-06-18", "Fernleaf Organics", "Sofia Marino"},
    {"Quartz Plaza", "Nairobi", "2019-05-21", "2020-12-08", "Juniper Labs", "Omar Haddad"},
    {"Willow Bend", "Galway", "2023-02-27", "2024-08-15", "Glacier Point Media", "Ingrid Dahl"},
}};

const std::array<const char*, 11> kAurpTemplates = {{
    "SELECT Location FROM Client WHERE Name = '[Client.Name]'",
    "SELECT Industry FROM Client WHERE Name = '[Client.Name]'",
    "SELECT ContactPerson FROM Client WHERE Name = '[Client.Name]'",
    "SELECT JobTitle FROM Employee WHERE Name = '[Employee.Name]'",
    "SELECT Department FROM Employee WHERE Name = '[Employee.Name]'",
    "SELECT SupervisorOrManager FROM Employee WHERE Name = '[Employee.Name]'",
    "SELECT Location FROM Project WHERE Name = '[Project.Name]'",
    "SELECT StartDate FROM Project WHERE Name = '[Project.Name]'",
    "SELECT EndDate FROM Project WHERE Name = '[Project.Name]'",
    "SELECT ClientName FROM Project WHERE Name = '[Project.Name]'",
    "SELECT ProjectDirector FROM Project WHERE Name = '[Project.Name]'",
}};

const std::array<const char*, 5> kSpiderTemplates = {{
    "SELECT Headquarters FROM company WHERE Name = '[company.Name]'",
    "SELECT Industry FROM company WHERE Name = '[company.Name]'",
    "SELECT Age FROM people WHERE Name = '[people.Name]'",
    "SELECT Nationality FROM people WHERE Name = '[people.Name]'",
    "SELECT Graduation_College FROM people WHERE Name = '[people.Name]'",
}};

const std::array<const char*, 6> kDistractorSuffixes = {{
    "alpha", "bravo", "charlie", "delta", "echo", "foxtrot",
}};

// Filler vocabulary shared by the distractor documents and the filler-heavy
// long paraphrases; none of these words appear in the fact documents.
const char* kDistractorBody =
    "Kindly note: anyone currently wondering about whatever records, details, or summaries "
    "remain available may certainly request help. Somebody could please provide a detailed, "
    "thorough, comprehensive overview, giving full background information regarding or "
    "concerning any known summary; such assistance remains deeply appreciated.";

std::string field_phrase(const std::string& column) {
    static const std::map<std::string, std::string> phrases = {
        {"Location", "location"},
        {"Industry", "industry"},
        {"ContactPerson", "contact person"},
        {"JobTitle", "job title"},
        {"Department", "department"},
        {"SupervisorOrManager", "supervisor or manager"},
        {"StartDate", "start date"},
        {"EndDate", "end date"},
        {"ClientName", "client name"},
        {"ProjectDirector", "project director"},
        {"Headquarters", "headquarters"},
        {"Age", "age"},
        {"Nationality", "nationality"},
        {"Graduation_College", "graduation college"},
    };
    auto it = phrases.find(column);
    if (it == phrases.end()) throw Error(ErrorCode::UnknownTableOrColumn, column);
    return it->second;
}

std::string entity_word(const std::string& table) {
    if (table == "Client") return "client";
    if (table == "Employee") return "employee";
    if (table == "Project") return "project";
    if (table == "company") return "company";
    if (table == "people") return "person";
    throw Error(ErrorCode::UnknownTableOrColumn, table);
}

std::string capitalized(std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
}

// Projected column of a fixture template ("SELECT <col> FROM ...").
std::string projected_column(const std::string& tpl_text) {
    size_t start = tpl_text.find(' ') + 1;
    size_t end = tpl_text.find(' ', start);
    return tpl_text.substr(start, end - start);
}

struct TemplateWords {
    std::string field;    // e.g. "start date"
    std::string entity;   // e.g. "project"
    std::string surface;  // e.g. "[Project.Name]"
};

TemplateWords words_for(const SqlTemplate& tpl) {
    TemplateWords w;
    w.field = field_phrase(projected_column(tpl.text));
    w.entity = entity_word(tpl.placeholders.at(0).table);
    w.surface = tpl.placeholders.at(0).surface();
    return w;
}

std::vector<std::string> make_short_patterns(const SqlTemplate& tpl, int count) {
    TemplateWords w = words_for(tpl);
    std::vector<std::string> all = {
        capitalized(w.field) + " for " + w.entity + " '" + w.surface + "'",
        "Get '" + w.surface + "' " + w.field,
        "Look up the " + w.field + " of the " + w.entity + " '" + w.surface + "'",
        "What is the " + w.field + " of '" + w.surface + "'?",
        "Tell me the " + w.field + " of the " + w.entity + " '" + w.surface + "'",
        capitalized(w.field) + " of '" + w.surface + "'",
        "Show the " + w.field + " for '" + w.surface + "'",
        "Find the " + w.field + " of the " + w.entity + " named '" + w.surface + "'",
        "Give the " + w.field + " of '" + w.surface + "'",
        "State the " + w.field + " recorded for '" + w.surface + "'",
    };
    all.resize(static_cast<size_t>(count));
    return all;
}

std::vector<std::string> make_long_patterns(const SqlTemplate& tpl, int count) {
    TemplateWords w = words_for(tpl);
    // The first paraphrase is long but filler-free; the other two lean on the
    // distractor vocabulary.
    std::vector<std::string> all = {
        "In the context of our ongoing portfolio review for this quarter, what is exactly the " +
            w.field + " of the " + w.entity + " that goes by the name '" + w.surface +
            "' in our internal " + w.entity + " listing?",
        "Could somebody please kindly respond by giving both detailed and comprehensive "
        "background information regarding the " +
            w.field + " of the " + w.entity + " named '" + w.surface +
            "', since our team files and records stay incomplete this quarter?",
        "Anyone currently wondering may help us compile a thorough overview, with whatever "
        "details are available concerning the presently known " +
            w.field + " of the " + w.entity + " called '" + w.surface +
            "'; a tidy summary would be hugely appreciated.",
    };
    static const std::array<const char*, 7> leads = {{
        "For the quarterly audit", "For the annual review", "For the board briefing",
        "For the planning workshop", "For the budget meeting", "For the site visit",
        "For the handover packet",
    }};
    for (int i = 0; static_cast<int>(all.size()) < count && i < static_cast<int>(leads.size());
         ++i) {
        all.push_back(std::string(leads[static_cast<size_t>(i)]) +
                      ", what is exactly the " + w.field + " of the " + w.entity +
                      " that appears in our reference files under the name '" + w.surface +
                      "', according to the latest revision of the shared register we maintain "
                      "for this review cycle?");
    }
    all.resize(static_cast<size_t>(count));
    return all;
}

void exec_sql(sqlite3* db, const std::string& sql) {
    char* err = nullptr;
    if (sqlite3_exec(db, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
        std::string message = err != nullptr ? err : "unknown sqlite error";
        sqlite3_free(err);
        throw Error(ErrorCode::SqlExecutionError, message + " in: " + sql);
    }
}

std::string quoted(const std::string& value) {
    std::string out = "'";
    for (char c : value) {
        out.push_back(c);
        if (c == '\'') out.push_back('\'');
    }
    out.push_back('\'');
    return out;
}

class WritableDb {
public:
    explicit WritableDb(const std::string& path) {
        std::filesystem::remove(path);
        if (sqlite3_open(path.c_str(), &db_) != SQLITE_OK) {
            throw Error(ErrorCode::ConnectionFailed, "cannot create " + path);
        }
    }
    ~WritableDb() {
        if (db_ != nullptr) sqlite3_close(db_);
    }
    sqlite3* get() { return db_; }

private:
    sqlite3* db_ = nullptr;
};

void build_aurp_db(const std::string& path) {
    WritableDb db(path);
    exec_sql(db.get(),
             "CREATE TABLE Client (Name TEXT PRIMARY KEY, Location TEXT NOT NULL, "
             "Industry TEXT NOT NULL, ContactPerson TEXT NOT NULL)");
    exec_sql(db.get(),
             "CREATE TABLE Employee (Name TEXT PRIMARY KEY, JobTitle TEXT NOT NULL, "
             "Department TEXT NOT NULL, SupervisorOrManager TEXT NOT NULL)");
    exec_sql(db.get(),
             "CREATE TABLE Project (Name TEXT PRIMARY KEY, Location TEXT NOT NULL, "
             "StartDate TEXT NOT NULL, EndDate TEXT NOT NULL, "
             "ClientName TEXT NOT NULL REFERENCES Client(Name), "
             "ProjectDirector TEXT NOT NULL REFERENCES Employee(Name))");
    exec_sql(db.get(), "BEGIN");
    for (const auto& c : kClients) {
        exec_sql(db.get(), "INSERT INTO Client VALUES (" + quoted(c.name) + ", " +
                               quoted(c.location) + ", " + quoted(c.industry) + ", " +
                               quoted(c.contact) + ")");
    }
    for (size_t i = 0; i < kEmployeeNames.size(); ++i) {
        exec_sql(db.get(), "INSERT INTO Employee VALUES (" + quoted(kEmployeeNames[i]) + ", " +
                               quoted(kJobTitles[i % kJobTitles.size()]) + ", " +
                               quoted(kDepartments[i % kDepartments.size()]) + ", " +
                               quoted(kManagers[i % kManagers.size()]) + ")");
    }
    for (const auto& p : kProjects) {
        exec_sql(db.get(), "INSERT INTO Project VALUES (" + quoted(p.name) + ", " +
                               quoted(p.location) + ", " + quoted(p.start) + ", " +
                               quoted(p.end) + ", " + quoted(p.client) + ", " +
                               quoted(p.director) + ")");
    }
    exec_sql(db.get(), "COMMIT");
}

struct CompanyRow {
    int id;
    const char* name;
    const char* headquarters;
    const char* industry;
    double sales;
};

const std::array<CompanyRow, 6> kCompanies = {{
    {1, "Nordwind Power", "Hamburg", "Energy", 112.4},
    {2, "Solent Banking Group", "London", "Banking", 98.7},
    {3, "Tessera Foods", "Chicago", "Food Processing", 64.2},
    {4, "Ukiyo Motors", "Nagoya", "Automotive", 188.9},
    {5, "Veridian Chemicals", "Lyon", "Chemicals", 47.5},
    {6, "Westbrook Retail", "Sydney", "Retail", 153.1},
}};

struct PersonRow {
    int id;
    int age;
    const char* name;
    const char* nationality;
    const char* college;
};

const std::array<PersonRow, 15> kPeople = {{
    {1, 34, "Aiden Brooks", "Canadian", "McGill University"},
    {2, 41, "Beatriz Lima", "Brazilian", "University of Sao Paulo"},
    {3, 29, "Chen Wei", "Chinese", "Tsinghua University"},
    {4, 52, "Davide Conti", "Italian", "Politecnico di Milano"},
    {5, 38, "Emeka Obi", "Nigerian", "University of Lagos"},
    {6, 46, "Freya Holm", "Danish", "University of Copenhagen"},
    {7, 31, "Gopal Menon", "Indian", "Indian Institute of Science"},
    {8, 57, "Hana Sato", "Japanese", "Kyoto University"},
    {9, 27, "Ivo Kovac", "Croatian", "University of Zagreb"},
    {10, 44, "Julia Herzog", "Austrian", "University of Vienna"},
    {11, 36, "Karim Fahmy", "Egyptian", "Cairo University"},
    {12, 49, "Lucia Vargas", "Chilean", "University of Chile"},
    {13, 33, "Mateo Silva", "Uruguayan", "University of the Republic"},
    {14, 40, "Nadia Petrescu", "Romanian", "University of Bucharest"},
    {15, 55, "Oskar Nilsson", "Swedish", "Lund University"},
}};

void build_spider_db(const std::string& path) {
    WritableDb db(path);
    exec_sql(db.get(),
             "CREATE TABLE company (Company_ID INTEGER PRIMARY KEY, Name TEXT, "
             "Headquarters TEXT, Industry TEXT, Sales_in_Billion REAL, "
             "Profits_in_Billion REAL, Assets_in_Billion REAL, Market_Value_in_Billion REAL)");
    exec_sql(db.get(),
             "CREATE TABLE people (People_ID INTEGER PRIMARY KEY, Age INTEGER, Name TEXT, "
             "Nationality TEXT, Graduation_College TEXT)");
    exec_sql(db.get(), "BEGIN");
    for (const auto& c : kCompanies) {
        exec_sql(db.get(), "INSERT INTO company VALUES (" + std::to_string(c.id) + ", " +
                               quoted(c.name) + ", " + quoted(c.headquarters) + ", " +
                               quoted(c.industry) + ", " + std::to_string(c.sales) + ", " +
                               std::to_string(c.sales * 0.1) + ", " +
                               std::to_string(c.sales * 2.0) + ", " +
                               std::to_string(c.sales * 1.5) + ")");
    }
    for (const auto& p : kPeople) {
        exec_sql(db.get(), "INSERT INTO people VALUES (" + std::to_string(p.id) + ", " +
                               std::to_string(p.age) + ", " + quoted(p.name) + ", " +
                               quoted(p.nationality) + ", " + quoted(p.college) + ")");
    }
    exec_sql(db.get(), "COMMIT");
}

std::string fact_sentence(const std::string& field, const std::string& entity,
                          const std::string& name, const std::string& value) {
    return "The " + field + " of the " + entity + " '" + name + "' is " + value + ".";
}

std::string intro_sentence(const std::string& entity, const std::string& name) {
    return "This document is the profile of the " + entity + " '" + name + "'.";
}

Corpus build_full_corpus() {
    Corpus corpus;
    int id = 0;
    for (const auto& c : kClients) {
        Document d;
        d.id = id++;
        d.title = std::string("Client: ") + c.name;
        d.body = intro_sentence("client", c.name) + " " +
                 fact_sentence("location", "client", c.name, c.location) + " " +
                 fact_sentence("industry", "client", c.name, c.industry) + " " +
                 fact_sentence("contact person", "client", c.name, c.contact);
        corpus.documents.push_back(std::move(d));
    }
    for (size_t i = 0; i < kEmployeeNames.size(); ++i) {
        std::string name = kEmployeeNames[i];
        Document d;
        d.id = id++;
        d.title = "Employee: " + name;
        d.body = intro_sentence("employee", name) + " " +
                 fact_sentence("job title", "employee", name, kJobTitles[i % kJobTitles.size()]) +
                 " " +
                 fact_sentence("department", "employee", name,
                               kDepartments[i % kDepartments.size()]) +
                 " " +
                 fact_sentence("supervisor or manager", "employee", name,
                               kManagers[i % kManagers.size()]);
        corpus.documents.push_back(std::move(d));
    }
    for (const auto& p : kProjects) {
        Document d;
        d.id = id++;
        d.title = std::string("Project: ") + p.name;
        d.body = intro_sentence("project", p.name) + " " +
                 fact_sentence("location", "project", p.name, p.location) + " " +
                 fact_sentence("start date", "project", p.name, p.start) + " " +
                 fact_sentence("end date", "project", p.name, p.end) + " " +
                 fact_sentence("client name", "project", p.name, p.client) + " " +
                 fact_sentence("project director", "project", p.name, p.director);
        corpus.documents.push_back(std::move(d));
    }
    for (const auto& suffix : kDistractorSuffixes) {
        Document d;
        d.id = id++;
        d.title = std::string("Notice ") + suffix;
        d.body = std::string(kDistractorBody) + " Office notice board entry " + suffix + ".";
        corpus.documents.push_back(std::move(d));
    }
    return corpus;
}

std::set<int> docless_document_ids() {
    std::set<int> ids;
    for (int c : kDoclessClients) ids.insert(c);
    for (int e : kDoclessEmployees) ids.insert(10 + e);
    return ids;
}

std::set<std::string> docless_names() {
    std::set<std::string> names;
    for (int c : kDoclessClients) names.insert(kClients[static_cast<size_t>(c)].name);
    for (int e : kDoclessEmployees) names.insert(kEmployeeNames[static_cast<size_t>(e)]);
    return names;
}

int document_id_for(const std::string& table, const std::string& name) {
    if (table == "Client") {
        for (size_t i = 0; i < kClients.size(); ++i)
            if (name == kClients[i].name) return static_cast<int>(i);
    } else if (table == "Employee") {
        for (size_t i = 0; i < kEmployeeNames.size(); ++i)
            if (name == kEmployeeNames[i]) return static_cast<int>(10 + i);
    } else if (table == "Project") {
        for (size_t i = 0; i < kProjects.size(); ++i)
            if (name == kProjects[i].name) return static_cast<int>(44 + i);
    }
    throw Error(ErrorCode::UnknownTableOrColumn, table + ": " + name);
}

std::vector<SqlTemplate> validated_templates(const DatabaseSchema& schema,
                                             const std::vector<const char*>& texts,
                                             const std::string& key) {
    std::vector<SqlTemplate> out;
    for (const char* text : texts) {
        ValidationResult v = validate_sql_template(text, schema, sql_criteria(), key);
        if (!v.ok()) throw Error(ErrorCode::FormatError, std::string("fixture template: ") + text);
        out.push_back(std::move(*v.accepted));
    }
    return out;
}

void build_manifests(const std::string& aurp_path, const std::string& manifest_full_path,
                     const std::string& manifest_path) {
    DatabaseHandle db(aurp_path);
    DatabaseSchema schema = db.load_schema().schema;
    Manifest full;
    Manifest deployment;
    std::set<std::string> missing = docless_names();
    for (const char* text : kAurpTemplates) {
        ValidationResult v = validate_sql_template(text, schema, sql_criteria(), "");
        SqlTemplate tpl = *v.accepted;
        std::string column = projected_column(tpl.text);
        std::string table = tpl.placeholders.at(0).table;
        std::string entity = entity_word(table);
        std::string field = field_phrase(column);
        InstantiateResult inst = instantiate(tpl, {}, db);
        for (const auto& group : inst.groups) {
            const std::string& name = group.combination.at(0);
            GoldEntry entry;
            entry.document_ids = {document_id_for(table, name)};
            entry.fact_sentence = fact_sentence(field, entity, name, group.answer.normalized);
            full.entries[group.group_id] = entry;
            if (missing.count(name) != 0) {
                deployment.entries[group.group_id] = GoldEntry{};
            } else {
                deployment.entries[group.group_id] = entry;
            }
        }
    }
    full.save(manifest_full_path);
    deployment.save(manifest_path);
}

void record_text_prompts(ReplayBackend& replay, const SqlTemplate& tpl, bool starved,
                         int per_template, const std::string& attr) {
    GenerationCriteria criteria =
        attr == "short" ? short_criteria(per_template) : long_criteria(per_template);
    std::vector<std::string> patterns = attr == "short"
                                            ? make_short_patterns(tpl, per_template)
                                            : make_long_patterns(tpl, per_template);
    auto join = [](const std::vector<std::string>& lines) {
        std::string out;
        for (const auto& l : lines) out += l + "\n";
        if (!out.empty()) out.pop_back();
        return out;
    };
    if (starved) {
        // The primary reply is one candidate short; the missing paraphrase
        // only appears when the prompt lists the accepted ones as exclusions.
        std::vector<std::string> primary(patterns.begin(), patterns.end() - 1);
        replay.record(build_text_generation_prompt(tpl, criteria, {}), 0.0, join(primary));
        replay.record(build_text_generation_prompt(tpl, criteria, primary), 0.0,
                      patterns.back());
    } else {
        replay.record(build_text_generation_prompt(tpl, criteria, {}), 0.0, join(patterns));
    }
}

void build_replay(const std::string& aurp_path, const std::string& spider_path,
                  const std::string& replay_path) {
    ReplayBackend replay(kReplayModel);

    DatabaseHandle aurp(aurp_path);
    DatabaseSchema aurp_schema = aurp.load_schema().schema;
    const std::vector<std::vector<const char*>> aurp_by_table = {
        {kAurpTemplates[0], kAurpTemplates[1], kAurpTemplates[2]},
        {kAurpTemplates[3], kAurpTemplates[4], kAurpTemplates[5]},
        {kAurpTemplates[6], kAurpTemplates[7], kAurpTemplates[8], kAurpTemplates[9],
         kAurpTemplates[10]},
    };
    auto subsets = aurp_subsets();
    for (size_t s = 0; s < subsets.size(); ++s) {
        std::string reply;
        for (const char* t : aurp_by_table[s]) reply += std::string(t) + "\n";
        reply.pop_back();
        replay.record(build_sql_generation_prompt(aurp_schema, subsets[s], sql_criteria()), 0.0,
                      reply);
        std::vector<SqlTemplate> tpls =
            validated_templates(aurp_schema, aurp_by_table[s], schema_key(subsets[s]));
        for (const auto& tpl : tpls) {
            // The Client templates are starved so the initial collection
            // yields 30 paraphrases per attribute instead of 33.
            bool starved = tpl.placeholders.at(0).table == "Client";
            record_text_prompts(replay, tpl, starved, 3, "short");
            record_text_prompts(replay, tpl, starved, 3, "long");
        }
    }

    DatabaseHandle spider(spider_path);
    DatabaseSchema spider_schema = spider.load_schema().schema;
    const std::vector<std::vector<const char*>> spider_by_table = {
        {kSpiderTemplates[0], kSpiderTemplates[1]},
        {kSpiderTemplates[2], kSpiderTemplates[3], kSpiderTemplates[4]},
    };
    auto spider_sets = spider_subsets();
    for (size_t s = 0; s < spider_sets.size(); ++s) {
        std::string reply;
        for (const char* t : spider_by_table[s]) reply += std::string(t) + "\n";
        reply.pop_back();
        replay.record(build_sql_generation_prompt(spider_schema, spider_sets[s], sql_criteria()),
                      0.0, reply);
        std::vector<SqlTemplate> tpls =
            validated_templates(spider_schema, spider_by_table[s], schema_key(spider_sets[s]));
        for (const auto& tpl : tpls) {
            record_text_prompts(replay, tpl, false, 10, "short");
            record_text_prompts(replay, tpl, false, 10, "long");
        }
    }

    replay.save(replay_path);
}

}  // namespace

GenerationCriteria sql_criteria() {
    GenerationCriteria c;
    c.kind = GenerationCriteria::Kind::Sql;
    c.instruction_text = prompts::kCriteriaSqlOnePlaceholder;
    c.required_placeholder_count = 1;
    return c;
}

GenerationCriteria short_criteria(int per_template) {
    GenerationCriteria c;
    c.kind = GenerationCriteria::Kind::Text;
    c.instruction_text = prompts::kCriteriaShort;
    c.num_generations = per_template;
    c.linguistic_attr = "short";
    return c;
}

GenerationCriteria long_criteria(int per_template) {
    GenerationCriteria c;
    c.kind = GenerationCriteria::Kind::Text;
    c.instruction_text = prompts::kCriteriaLong;
    c.num_generations = per_template;
    c.linguistic_attr = "long";
    return c;
}

std::vector<std::vector<std::string>> aurp_subsets() {
    return {{"Client"}, {"Employee"}, {"Project"}};
}

std::vector<std::vector<std::string>> spider_subsets() {
    return {{"company"}, {"people"}};
}

FixtureSet build(const std::string& dir) {
    std::filesystem::create_directories(dir);
    FixtureSet set;
    set.dir = dir;
    set.aurp_db = dir + "/aurp.sqlite";
    set.spider_db = dir + "/company_employee.sqlite";
    set.corpus_full = dir + "/corpus_full.json";
    set.corpus = dir + "/corpus.json";
    set.manifest_full = dir + "/manifest_full.json";
    set.manifest = dir + "/manifest.json";
    set.replay = dir + "/replay.json";

    build_aurp_db(set.aurp_db);
    build_spider_db(set.spider_db);

    Corpus full = build_full_corpus();
    full.save(set.corpus_full);
    Corpus deployment;
    std::set<int> missing = docless_document_ids();
    for (const auto& doc : full.documents) {
        if (missing.count(doc.id) == 0) deployment.documents.push_back(doc);
    }
    deployment.save(set.corpus);

    build_manifests(set.aurp_db, set.manifest_full, set.manifest);
    build_replay(set.aurp_db, set.spider_db, set.replay);
    return set;
}

std::map<std::string, std::string> open_domain_answers(const Dataset& dataset,
                                                       const Manifest& deployment_manifest) {
    std::map<std::string, std::string> out;
    for (const auto& group : dataset.groups) {
        bool project = group.sql_query.find("FROM Project") != std::string::npos;
        bool client = group.sql_query.find("FROM Client") != std::string::npos;
        bool docless = false;
        auto it = deployment_manifest.entries.find(group.group_id);
        if (it != deployment_manifest.entries.end()) docless = it->second.document_ids.empty();
        if (project || (client && docless)) out[group.group_id] = group.answer.normalized;
    }
    return out;
}

Corpus corrupt_documents(Corpus corpus, const std::vector<int>& doc_ids) {
    std::set<int> targets(doc_ids.begin(), doc_ids.end());
    for (auto& doc : corpus.documents) {
        if (targets.count(doc.id) != 0) {
            doc.body = "The contents of this record were lost during an archive migration.";
        }
    }
    return corpus;
}

}  // namespace grammar::fixtures
