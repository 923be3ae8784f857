#include "grammar/prompts.hpp"

#include <nlohmann/json.hpp>

namespace grammar::prompts {

const char* const kCatalogVersion = "1";

const char* const kSqlTemplateGenerator =
    R"(You are a SQL query Template Generator: Generate ACCEPTABLE SQL query
templates with placeholders according to the give data schema and
requirements. A simple example of an acceptable SQL query template is:
SELECT Industry FROM Company WHERE Name = '[Company.Name]';

You must follow the basic criteria below except for other requirements:
##CRITERIA##
- The placeholder format should be a combination of a table name and
a column name, enclosed within square brackets, e.g., '[User.Name]'.
- Use only 'SELECT' queries.
- Select specific column(s) instead of using '*'. Avoid projecting
attributes that appear in the predicate.
- The selected and condition columns in the query MUST BE MEANINGFUL and
DESCRIPTIVE to ensure the queries are easily understood by non-technical
users.
- Avoid using technical column names that don't clearly signify the nature
of the entities or objects involved, e.g., column for semantically void
record identifiers.
- Do not create redundant or semantically duplicated queries when translated
into natural language.
- Each query must contain at least one parameter placeholder in the WHERE
clause.
- Ensure the query yields a specific and singular answer to avoid multiplicity
issues, thus facilitating accurate chatbot evaluation.
{SPECIFIC_REQUIREMENTS}
- If no acceptable SQL template can be generated with the given table and
column information, do not generate any text.

##RESPONSE FORMAT##
- Output each SQL template as a single line, without any prefix or suffix.
- Do not include any other text in your response, even something like
##RESPONSE_END##.

##DATA SCHEMA##
{GIVEN_SCHEMA}

##RESPONSE_START##)";

const char* const kTextTemplateGenerator =
    R"(You are a Text Query Template Generator: Rewrite the SQL query template below
as natural language question templates. Keep every placeholder exactly as it
appears in the SQL template, including the square brackets and quotes.

##CRITERIA##
{CRITERIA}

##RESPONSE FORMAT##
- Output exactly {NUM_GENERATIONS} templates, one per line, without any prefix or suffix.
- Do not include any other text in your response.

##SQL TEMPLATE##
{SQL_TEMPLATE}

##RESPONSE_START##)";

const char* const kTextTemplateReprompt =
    R"(You are a Text Query Template Generator: Rewrite the SQL query template below
as natural language question templates. Keep every placeholder exactly as it
appears in the SQL template, including the square brackets and quotes.

##CRITERIA##
{CRITERIA}

##RESPONSE FORMAT##
- Output exactly {NUM_GENERATIONS} templates, one per line, without any prefix or suffix.
- Do not include any other text in your response.

##DO NOT REPEAT ANY OF THESE##
{EXISTING_TEMPLATES}

##SQL TEMPLATE##
{SQL_TEMPLATE}

##RESPONSE_START##)";

const char* const kCriteriaSqlOnePlaceholder =
    "Each query must contain at least one parameter placeholder in the WHERE clause.";

const char* const kCriteriaShort =
    R"(Short and Clear: Keep your queries short and straightforward.
Cut down on words and skip parts of speech, such as conjunctions and articles.
It's okay to use fragmented phrases as long as they still convey the full meaning.
Valid examples: "client of '[Project.Name]'" or "client for '[Project.Name]'";
Invalid Examples: "Find the client of a project named '[Project.Name]'.)";

const char* const kCriteriaLong =
    R"(Complex Sentence Structure: Ensure your queries are always in complete sentences.
Opt for longer, more complex sentence structures,
incorporating elements of speech like conjunctions and articles for fuller expression.
Each query should be at least 30 words long.
You can add context and background information to the query.)";

const char* const kJudgeReference =
    R"(Evaluate the accuracy of the given response in relation to the true answer for the specified query. After evaluating, provide a judgement as either "Correct" or "Incorrect" based on whether the ##Given Response## accurately matches the ##True Answer##.
##Query##: {query}
##True Answer##: {true_answer}
##Given Response##: {given_response}
##Judgement##:)";

const char* const kRagasNli =
    R"(Natural language inference. Use only 'Yes' (1), 'No' (0) and 'Null' (-1) as verdict.
context: {context}
statement: {statement}
verdict:)";

const char* const kSelfCheckSentence =
    R"(Context: {context}
Sentence: {sentence}
Is the sentence supported by the context above?
Answer Yes or No:)";

const char* const kSelfCheckQa =
    R"(Query: {query}
Answer A: {answer}
Answer B: {stochastic_answer}
Do both answers address the query with equivalent meaning?
Use only "Yes" or "No" for your evaluation:)";

const char* const kStatementDecomposition =
    R"(Break down the response below into a list of atomic factual statements.
Each statement must contain exactly one fact and be understandable on its own.
Output one statement per line, without numbering or bullets.
Response: {response}
Statements:)";

const char* const kRagAnswer =
    R"(Answer the question using only the context.
Context: {context}
Question: {query}
Answer:)";

std::string fill(const std::string& tmpl, const std::map<std::string, std::string>& slots) {
    std::string out = tmpl;
    for (const auto& [name, value] : slots) {
        std::string token = "{" + name + "}";
        size_t pos = 0;
        while ((pos = out.find(token, pos)) != std::string::npos) {
            out.replace(pos, token.size(), value);
            pos += value.size();
        }
    }
    return out;
}

std::string catalog_json() {
    nlohmann::ordered_json j;
    j["version"] = kCatalogVersion;
    j["prompts"] = {
        {"sql_template_generator", kSqlTemplateGenerator},
        {"text_template_generator", kTextTemplateGenerator},
        {"text_template_reprompt", kTextTemplateReprompt},
        {"criteria_sql_one_placeholder", kCriteriaSqlOnePlaceholder},
        {"criteria_short", kCriteriaShort},
        {"criteria_long", kCriteriaLong},
        {"judge_reference", kJudgeReference},
        {"ragas_nli", kRagasNli},
        {"selfcheck_sentence", kSelfCheckSentence},
        {"selfcheck_qa", kSelfCheckQa},
        {"statement_decomposition", kStatementDecomposition},
        {"rag_answer", kRagAnswer},
    };
    return j.dump(4);
}

}  // namespace grammar::prompts
