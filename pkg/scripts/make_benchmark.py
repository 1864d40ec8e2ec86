#!/usr/bin/env python3
"""Generate the committed benchmark fixture: raw scanner reports plus ground truth.

Real annotated scan corpora cannot be redistributed here, so this script
synthesizes one with the same shape and the same difficulty profile: a SAST
dataset of 1351 findings in 183 clusters (largest 408) from seven tools, and
a DAST dataset of 36 findings in 10 clusters (largest 25) from two tools.
The generator is fully seeded; running it twice produces identical bytes.

Difficulty is injected deliberately, mirroring how scanner text actually
fails deduplication:

* dependency scanners quoting the same advisory text for the same CVE
  (easy: CVE concatenation collapses these)
* title-only findings with no real description
* the same flaw phrased differently by different code scanners
* verbose vs. terse descriptions of one issue
* code context baked into the message (over-specified location)
* two distinct secrets triggering the same canned rule message

Outputs under --out:
    reports/sast/<tool>.json   raw report per SAST tool
    reports/dast/<tool>.json   raw report per DAST tool
    dataset_sast.json          normalized dataset (via the real ingest path)
    dataset_dast.json
    truth_sast.json            ground-truth ClusterSet JSON
    truth_dast.json
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from collections import defaultdict
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from secdedup.clustering import ClusterSet, save_cluster_set
from secdedup.ingest import assemble_dataset, load_default_catalog, parse_report, save_dataset

DEFAULT_SEED = 20240814

SAST_FINDINGS = 1351
SAST_CLUSTERS = 183

# ---------------------------------------------------------------------------
# text banks
# ---------------------------------------------------------------------------

FLAWS = [
    "heap-based buffer overflow", "prototype pollution issue", "path traversal flaw",
    "improper input validation bug", "use-after-free condition", "integer overflow",
    "regular expression denial of service issue", "off-by-one error",
    "type confusion flaw", "race condition", "NULL pointer dereference",
    "incomplete sanitization routine", "insecure temporary file handling issue",
    "XML external entity expansion flaw", "deserialization flaw",
]

COMPONENTS = [
    "the query parser", "the archive extraction routine", "the template renderer",
    "the URL normalizer", "the session middleware", "the multipart decoder",
    "the configuration loader", "the header parsing logic", "the redirect handler",
    "the schema validator", "the cache layer", "the websocket frame reader",
    "the cookie jar implementation", "the logging formatter", "the locale resolver",
]

IMPACTS = [
    "execute arbitrary code", "cause a denial of service",
    "disclose sensitive memory contents", "bypass authentication checks",
    "overwrite arbitrary files", "escalate privileges on the host",
    "inject properties into Object.prototype", "read files outside the intended root",
    "poison the response cache", "forge session tokens",
]

VECTORS = [
    "a crafted archive entry", "specially crafted JSON input", "a malformed HTTP header",
    "an overlong query string", "a recursive payload", "a symlinked path segment",
    "a crafted regular expression subject", "nested template expressions",
    "an unexpected content-type value", "a truncated multibyte sequence",
]

LIBRARIES = [
    "castproto", "fastparse", "hookstream", "yamlier", "miniroute", "jsonpath-core",
    "deepmixin", "formbind", "cryptolite", "tarwalk", "renderlet", "asyncpool",
    "wsframe", "logfmtr", "cookiekit", "schemata", "urlgrind", "multipartly",
    "localefmt", "cachetier", "tokenforge", "redirecta", "sessionmw", "protobend",
    "xmlttle", "markquill", "zipliner", "bytefield", "querymint", "templ8",
    "statictree", "graphviewr", "promisery", "streamlab", "validoor", "hexcodec",
    "datemath", "colorwheel", "unicoder", "pathcarve",
]

SECRET_RULES = {
    "aws-access-key": "AWS access key detected",
    "generic-api-key": "Generic API key detected",
    "github-pat": "GitHub personal access token detected",
    "private-key": "Asymmetric private key detected",
    "npm-token": "npm registry auth token detected",
}

SOURCE_FILES = [
    "routes/login.ts", "routes/search.ts", "routes/order.ts", "routes/profile.ts",
    "lib/db.ts", "lib/render.ts", "lib/http.ts", "lib/session.ts", "lib/files.ts",
    "workers/export.ts", "workers/import.ts", "admin/panel.ts", "admin/users.ts",
    "config/main.yml", "config/test.env", "Dockerfile", "scripts/seed.js",
    "frontend/src/app.ts", "frontend/src/cart.ts", "server.ts",
]

PACKAGE_PATHS = [
    "package-lock.json", "frontend/package-lock.json", "node_modules/.pkg-cache",
    "build/layer-app", "build/layer-deps",
]


class AdvisoryWriter:
    """NVD-style advisory sentences, never reusing a flaw/component/impact triple."""

    def __init__(self, rng: random.Random):
        self.rng = rng
        self.seen: set[tuple[str, str, str]] = set()

    def write(self, lib: str, cve: str, related: str | None) -> str:
        while True:
            triple = (
                self.rng.choice(FLAWS),
                self.rng.choice(COMPONENTS),
                self.rng.choice(IMPACTS),
            )
            if triple not in self.seen:
                self.seen.add(triple)
                break
        flaw, component, impact = triple
        vector = self.rng.choice(VECTORS)
        major = self.rng.randint(1, 6)
        minor = self.rng.randint(0, 12)
        patch = self.rng.randint(1, 20)
        version = f"{major}.{minor}.{patch}"
        fixed = f"{major}.{minor}.{patch + 1}"
        text = (
            f"A {flaw} in {component} of {lib} before {version} allows remote "
            f"attackers to {impact} via {vector}. Tracked as {cve}. Versions "
            f"{fixed} and later of {lib} contain a fix."
        )
        if related:
            text += f" This issue exists because of an incomplete fix for {related}."
        return text


# ---------------------------------------------------------------------------
# builder
# ---------------------------------------------------------------------------

class ReportBuilder:
    """Raw findings per tool, each remembering its ground-truth cluster key."""

    def __init__(self) -> None:
        self.entries: dict[str, list[tuple[dict, str]]] = defaultdict(list)

    def add(self, tool: str, item: dict, cluster_key: str) -> None:
        self.entries[tool].append((item, cluster_key))


def dep_finding(tool: str, cve: str, lib: str, text: str, path: str) -> dict:
    """Shape one dependency finding the way the given scanner exports it."""
    if tool == "trivy":
        return {"VulnerabilityID": cve, "PkgName": lib, "Title": f"{lib}: {cve}",
                "Description": text, "_target": path}
    if tool == "anchore":
        return {"vulnerability": {"id": cve, "description": text},
                "artifact": {"name": lib, "locations": [path]}}
    if tool == "dependency-check":
        return {"name": cve, "description": text, "_file": path}
    raise ValueError(tool)


# ---------------------------------------------------------------------------
# SAST construction
# ---------------------------------------------------------------------------

# Dependency problem mix: (cluster count, CVEs each, per-CVE tool coverage).
# Coverage maps tool -> paths reported. Every tool quotes the same advisory
# text for a CVE, so CVE concatenation folds each problem into one document.
DEP_PLAN = [
    (20, 3, {"trivy": 2, "anchore": 2, "dependency-check": 1}),
    (25, 2, {"trivy": 2, "anchore": 1, "dependency-check": 1}),
    (25, 2, {"trivy": 2, "dependency-check": 1}),
    (20, 1, {"trivy": 2, "anchore": 1, "dependency-check": 1}),
    (14, 1, {"anchore": 2, "dependency-check": 1}),
    (15, 1, {"trivy": 2}),
    (6, 1, {"dependency-check": 1}),
]

# Mega problem: one core library with a long chained CVE history, reported
# en masse by all three dependency scanners: 240 + 120 + 48 = 408 findings.
MEGA_CVES = 48
MEGA_TRIVY_PATHS = 5
MEGA_ANCHORE_CVES = 40
MEGA_ANCHORE_PATHS = 3


def build_sast_dependencies(rng: random.Random, builder: ReportBuilder) -> None:
    advisories = AdvisoryWriter(rng)

    mega_lib = LIBRARIES[0]
    mega_cves = [f"CVE-2021-{90000 + i}" for i in range(MEGA_CVES)]
    mega_texts = {
        cve: advisories.write(mega_lib, cve, mega_cves[i - 1] if i else None)
        for i, cve in enumerate(mega_cves)
    }
    for cve in mega_cves:
        for path in PACKAGE_PATHS[:MEGA_TRIVY_PATHS]:
            builder.add("trivy", dep_finding("trivy", cve, mega_lib, mega_texts[cve], path), "mega")
    for cve in mega_cves[:MEGA_ANCHORE_CVES]:
        for path in PACKAGE_PATHS[:MEGA_ANCHORE_PATHS]:
            builder.add("anchore", dep_finding("anchore", cve, mega_lib, mega_texts[cve], path), "mega")
    for cve in mega_cves:
        builder.add("dependency-check",
                    dep_finding("dependency-check", cve, mega_lib, mega_texts[cve],
                                PACKAGE_PATHS[0]),
                    "mega")

    serial = 60000
    problem_index = 0
    for count, n_cves, coverage in DEP_PLAN:
        for _ in range(count):
            lib = LIBRARIES[1 + problem_index % (len(LIBRARIES) - 1)]
            key = f"dep-{problem_index}"
            cves = [f"CVE-2022-{serial + i}" for i in range(n_cves)]
            serial += n_cves
            texts = {
                cve: advisories.write(lib, cve, cves[i - 1] if i else None)
                for i, cve in enumerate(cves)
            }
            for tool in ("trivy", "anchore", "dependency-check"):
                paths = coverage.get(tool, 0)
                for cve in cves:
                    for path in PACKAGE_PATHS[:paths]:
                        builder.add(tool, dep_finding(tool, cve, lib, texts[cve], path), key)
            problem_index += 1


def build_sast_secrets(rng: random.Random, builder: ReportBuilder) -> None:
    """26 findings, 9 clusters. One canned message per rule: two different
    leaked keys under the same rule read identically and will overcluster."""
    plan = [
        ("aws-access-key", 4), ("aws-access-key", 3),
        ("generic-api-key", 3), ("generic-api-key", 2), ("generic-api-key", 2),
        ("github-pat", 2), ("github-pat", 1),
        ("private-key", 5), ("npm-token", 4),
    ]
    files = iter(rng.sample(SOURCE_FILES * 3, len(SOURCE_FILES) * 3))
    for index, (rule, count) in enumerate(plan):
        for _ in range(count):
            builder.add(
                "gitleaks",
                {"RuleID": rule, "Description": SECRET_RULES[rule],
                 "File": next(files), "StartLine": rng.randint(3, 400)},
                f"secret-{index}",
            )


# One canned message per (rule, tool); band 1 clusters repeat a single tool's
# message across locations, so they hold together at any threshold.
BAND1_RULES = [
    ("sqli", "codeql",
     "User-provided value flows into a SQL query without sanitization, "
     "enabling SQL injection. Build the statement with bound parameters "
     "instead of string concatenation."),
    ("xss-stored", "semgrep",
     "User data rendered into HTML without escaping allows stored cross-site "
     "scripting. Encode output or use a safe templating API."),
    ("path-traversal", "horusec",
     "Path traversal: a file path assembled from request input reaches a "
     "filesystem call without normalization against a base directory."),
    ("weak-hash", "codeql",
     "Use of a broken or weak cryptographic hash algorithm for password "
     "storage. Replace MD5 with a memory-hard key derivation function."),
    ("insecure-random", "semgrep",
     "Insecure randomness: Math.random output feeds a security token. Use a "
     "cryptographically secure generator for secrets."),
    ("zip-slip", "horusec",
     "Unsafe archive extraction: entry names are used in output paths, "
     "letting crafted archives write files outside the target directory."),
    ("xxe", "codeql",
     "The XML parser resolves external entities for untrusted documents, "
     "exposing local files and internal network services."),
    ("csrf-missing", "semgrep",
     "Route modifies server state without CSRF protection middleware; add "
     "per-session anti-forgery tokens."),
    ("open-redirect", "horusec",
     "Open redirect: the Location header is taken from an unchecked request "
     "parameter and can send users to attacker-chosen sites."),
    ("hardcoded-jwt", "codeql",
     "The JWT signing key is a hardcoded string constant, so tokens can be "
     "forged by anyone who reads the repository."),
    ("prototype-pollution", "semgrep",
     "Detected unsafe recursive object merge reachable from request data; "
     "attacker-supplied keys can pollute Object.prototype."),
    ("nosql-injection", "horusec",
     "NoSQL injection: a request object is passed directly into a MongoDB "
     "query operator without shape validation."),
]

# Band 2: the same flaw phrased differently by all three code scanners.
# These split at strict thresholds (the divergent-phrasing failure mode).
BAND2_RULES = [
    ("cmd-injection",
     "Command line built from request data is executed through a shell, "
     "permitting operating system command injection.",
     "Detected child_process exec with a template string containing user "
     "input. Prefer execFile with an argument array.",
     "Shell execution uses unsanitized external value."),
    ("ssrf",
     "A URL fetched by the server is derived from a request parameter, so "
     "internal services become reachable by outside callers.",
     "Detected http request whose destination comes from user input. "
     "Validate against an allowlist of hosts.",
     "Server side request forgery risk via dynamic target address."),
    ("ldap-injection",
     "Unescaped input is concatenated into an LDAP search filter, altering "
     "the query structure.",
     "Detected LDAP filter string built with untrusted data; escape "
     "metacharacters or use a parameterized filter API.",
     "Directory query assembled from raw request content."),
    ("log-forging",
     "Untrusted text is written into the application log without newline "
     "filtering, letting attackers forge log entries.",
     "Detected logger call with unsanitized request value; strip CR and LF "
     "characters first.",
     "Log output can be manipulated through external input."),
    ("regex-dos",
     "A regular expression with super-linear worst case runtime is applied "
     "to request input, enabling denial of service.",
     "Detected vulnerable regex pattern evaluated on user data; rewrite the "
     "expression or bound the input length.",
     "Catastrophic backtracking possible in pattern matching."),
    ("insecure-deserialize",
     "Serialized objects received from the network are deserialized without "
     "type restrictions, enabling gadget chain execution.",
     "Detected deserialization of request body content; use a data-only "
     "format or an allowlist of classes.",
     "Untrusted payload restored into live objects."),
    ("tmpfile-race",
     "A predictable temporary file name is created non-atomically, allowing "
     "a local attacker to pre-create or swap the file.",
     "Detected insecure temp file creation; use the mkstemp family "
     "instead.",
     "Race window between file name choice and file open."),
    ("header-injection",
     "A response header value contains unencoded request input, permitting "
     "header splitting and cache poisoning.",
     "Detected setHeader call with raw user data; strip control characters "
     "before writing headers.",
     "HTTP response header constructed from external text."),
]

# Band 3: one tool emits only a terse heading (the title-only failure mode),
# another a full sentence for the same problem.
BAND3_RULES = [
    ("debug-enabled", "Debug mode enabled",
     "The application ships with framework debug mode switched on, which "
     "exposes stack traces and configuration values to end users."),
    ("cors-wildcard", "CORS misconfiguration",
     "Access-Control-Allow-Origin is set to the wildcard, so any origin may "
     "read authenticated API responses."),
    ("trust-proxy", "Proxy trust misconfiguration",
     "The HTTP framework trusts all upstream proxies, allowing client IP "
     "spoofing through forged forwarding headers."),
    ("verbose-errors", "Verbose error output",
     "Unhandled exceptions return full stack traces in HTTP responses, "
     "leaking implementation detail useful to attackers."),
    ("session-fixation", "Session fixation",
     "The session identifier is not regenerated after authentication, "
     "permitting session fixation attacks."),
    ("dir-listing", "Directory listing enabled",
     "The static file server renders directory indexes, exposing file names "
     "that were never meant to be public."),
]

# Band 4: the message quotes the exact code context, so two findings of one
# problem share almost no tokens (the over-specified location failure mode).
BAND4_RULES = [
    ("missing-auth-check",
     ["Detected route handler app.get('/api/admin/quarantine', "
      "serveQuarantine) registered before ensureAdmin middleware in "
      "server.ts line 214.",
      "Detected route handler app.put('/rest/settings', updateSettings) "
      "mounted outside the authenticated router group in admin/panel.ts "
      "line 77."]),
    ("unbounded-upload",
     ["Detected fileUpload() configured without limits option at "
      "lib/http.ts line 31; multer accepts bodies of any size.",
      "Detected busboy stream piped to disk with no maxFileSize guard at "
      "workers/import.ts line 142."]),
    ("tls-verify-off",
     ["Detected rejectUnauthorized false inside https.Agent options at "
      "lib/db.ts line 9.",
      "Detected NODE_TLS_REJECT_UNAUTHORIZED set to zero in "
      "config/test.env entry loaded by scripts/seed.js."]),
]

# Band 5: unique single-finding issues, one scanner each.
BAND5_TEXTS = [
    "The Content-Security-Policy middleware is registered after the static "
    "file handler, so policy headers never reach bundled assets.",
    "A development-only authentication bypass flag is readable from the "
    "environment in production builds.",
    "Backup SQL dump committed to the repository contains production-like "
    "customer records.",
    "The password reset token is logged at info level on every request.",
    "JWT tokens are accepted with the none signature algorithm.",
    "The admin panel route is excluded from the authorization middleware "
    "chain.",
    "An interactive debug console is reachable on the metrics port.",
    "Uploaded SVG files are served inline without content type sniffing "
    "protection.",
    "The CSP report endpoint reflects attacker controlled JSON into the "
    "error page.",
    "SameSite attribute missing on the refresh token cookie.",
    "The GraphQL endpoint permits full schema introspection without "
    "authentication.",
    "Bundled source maps expose original TypeScript sources in production.",
    "An internal health endpoint reveals dependency versions to "
    "unauthenticated callers.",
    "Clickjacking protection header omitted on the checkout flow.",
    "The CSV export interpolates user text enabling formula injection in "
    "spreadsheet clients.",
    "Remember-me tokens never expire server side after logout.",
    "Object identifiers in the order API are sequential and unscoped, "
    "enabling enumeration of other customers.",
    "The audit trail can be disabled through an unauthenticated POST to the "
    "settings route.",
    "Password complexity rules are enforced only in the browser and not by "
    "the registration API.",
]


def code_item(tool: str, rule: str, text: str, file: str) -> dict:
    if tool == "codeql":
        return {"ruleId": f"js/{rule}", "message": {"text": text},
                "locations": [{"physicalLocation": {"artifactLocation": {"uri": file}}}]}
    if tool == "semgrep":
        return {"check_id": f"javascript.lang.security.{rule}", "path": file,
                "extra": {"message": text}}
    if tool == "horusec":
        return {"vulnerabilities": {"rule_id": f"HS-{rule.upper()}", "details": text,
                                    "file": file}}
    raise ValueError(tool)


def build_sast_code(rng: random.Random, builder: ReportBuilder) -> None:
    # Band 1: 12 clusters, one tool each, canned message at 2-5 locations.
    for index, (rule, tool, text) in enumerate(BAND1_RULES):
        for file in rng.sample(SOURCE_FILES, 2 + index % 4):
            builder.add(tool, code_item(tool, rule, text, file), f"code-{rule}")

    # Band 2: 8 clusters, all three scanners, divergent phrasing.
    tools = ("codeql", "semgrep", "horusec")
    for rule, *texts in BAND2_RULES:
        for tool, text in zip(tools, texts):
            builder.add(tool, code_item(tool, rule, text, rng.choice(SOURCE_FILES)),
                        f"code-{rule}")

    # Band 3: 6 clusters: horusec twice with a bare title, codeql once with
    # a full description.
    for rule, title, long_text in BAND3_RULES:
        for _ in range(2):
            builder.add("horusec",
                        code_item("horusec", rule, title, rng.choice(SOURCE_FILES)),
                        f"code-{rule}")
        builder.add("codeql",
                    code_item("codeql", rule, long_text, rng.choice(SOURCE_FILES)),
                    f"code-{rule}")

    # Band 4: 3 clusters of 2 semgrep findings quoting divergent code context.
    for rule, texts in BAND4_RULES:
        for text in texts:
            builder.add("semgrep",
                        code_item("semgrep", rule, text, rng.choice(SOURCE_FILES)),
                        f"code-{rule}")

    # Band 5: 19 singleton clusters.
    for index, text in enumerate(BAND5_TEXTS):
        tool = tools[index % 3]
        builder.add(tool, code_item(tool, f"single-{index}", text,
                                    rng.choice(SOURCE_FILES)),
                    f"code-single-{index}")


def build_sast(rng: random.Random, builder: ReportBuilder) -> None:
    build_sast_dependencies(rng, builder)
    build_sast_secrets(rng, builder)
    build_sast_code(rng, builder)


# ---------------------------------------------------------------------------
# DAST construction
# ---------------------------------------------------------------------------

def build_dast(builder: ReportBuilder) -> None:
    """36 findings in 10 clusters; the header-policy alert dominates with 25."""

    def zap_alert(name: str, desc: str, solution: str, url: str, key: str) -> None:
        builder.add("zap", {"name": name, "desc": desc, "solution": solution,
                            "riskdesc": "Medium (High)", "url": url}, key)

    def arachni_issue(name: str, desc: str, remedy: str, url: str, key: str) -> None:
        builder.add("arachni", {"name": name, "description": desc,
                                "remedy_guidance": remedy, "url": url}, key)

    base = "https://shop.example.test"

    # Cluster 1 (25 findings): missing Content Security Policy header, raised
    # on nearly every page by both scanners. The two tools word it
    # differently but share the load-bearing vocabulary, with the remaining
    # differences being close synonyms.
    zap_csp_desc = (
        "Content Security Policy is an added layer of security that helps to "
        "detect and mitigate certain types of attacks, including cross site "
        "scripting and data injection attacks. The response does not set a "
        "Content-Security-Policy header, so the browser applies no "
        "restriction on the sources from which scripts, styles or frames may "
        "be loaded."
    )
    zap_csp_sol = (
        "Configure the web server to set a Content-Security-Policy header on "
        "every response and restrict script, style and frame sources to "
        "trusted origins."
    )
    ara_csp_desc = (
        "Content Security Policy is an added layer of security that helps to "
        "detect and reduce certain types of attacks, including cross site "
        "scripting and data injection attacks. The response does not supply "
        "a Content-Security-Policy header, so the browser applies no "
        "restriction on the sources from which scripts, styles or frames may "
        "be fetched."
    )
    ara_csp_rem = (
        "Configure the web server to set a Content-Security-Policy header on "
        "every response and confine script, style and frame sources to "
        "trusted origins."
    )
    zap_pages = ["/", "/search", "/login", "/register", "/basket", "/checkout",
                 "/profile", "/contact", "/about", "/products", "/products/1",
                 "/track-order", "/score-board", "/administration"]
    ara_pages = ["/", "/search", "/login", "/basket", "/checkout", "/profile",
                 "/contact", "/products", "/legal", "/forgot-password", "/api/docs"]
    for page in zap_pages:
        zap_alert("Content Security Policy Header Not Set", zap_csp_desc,
                  zap_csp_sol, base + page, "csp")
    for page in ara_pages:
        arachni_issue("Missing Content-Security-Policy header", ara_csp_desc,
                      ara_csp_rem, base + page, "csp")

    # Cluster 2 (2): SQL injection, phrased so differently that only a reader
    # who knows the application links them (the app-context failure mode).
    zap_alert(
        "SQL Injection",
        "The page results were successfully manipulated using boolean "
        "conditions appended to the parameter q. The backend returned a "
        "database syntax message for a single quote payload, indicating the "
        "parameter is evaluated inside a SQL statement.",
        "Use prepared statements with bound parameters for every database "
        "access and reject unexpected metacharacters.",
        base + "/rest/products/search?q=apple", "sqli")
    arachni_issue(
        "Blind timing differential in login form",
        "Submitting the email field with a payload that delays execution "
        "caused the endpoint to respond consistently slower than the "
        "baseline, which reveals that attacker supplied text reaches an "
        "interpreter in the persistence layer.",
        "Audit the authentication handler and move all persistence calls to "
        "parameterized APIs.",
        base + "/rest/user/login", "sqli")

    # Cluster 3 (2): reflected XSS. Like the SQL injection pair, the two
    # write-ups share almost no wording; a sentence encoder still places
    # them close together while keyword matching does not.
    zap_alert(
        "Cross Site Scripting (Reflected)",
        "The search parameter copies request text into the page markup "
        "without output encoding. A proof of concept script element "
        "submitted in the query string executed when the browser rendered "
        "the result, demonstrating JavaScript execution in the victim "
        "session.",
        "Apply contextual output encoding to every reflected value and "
        "validate user input against an allowlist.",
        base + "/search?q=probe", "xss")
    arachni_issue(
        "Client-side code injection",
        "A probe carrying active HTML was interpreted by the document "
        "parser of the application. The taint trace shows hostile content "
        "reaching the innerHTML sink, so arbitrary client side code runs "
        "under the site origin.",
        "Sanitize tainted data before it reaches a rendering sink and "
        "prefer safe DOM assignment interfaces.",
        base + "/search", "xss")

    # Clusters 4-10: singletons unique to one scanner.
    zap_alert(
        "Cookie Without HttpOnly Flag",
        "A session cookie has been set without the HttpOnly flag, which "
        "means the cookie can be accessed by client side JavaScript and "
        "stolen through script injection.",
        "Set the HttpOnly attribute on all cookies that carry session "
        "state.",
        base + "/", "zap-cookie")
    zap_alert(
        "X-Frame-Options Header Not Set",
        "The response lacks an X-Frame-Options header, leaving the page "
        "embeddable in a hostile frame and exposed to clickjacking "
        "overlays.",
        "Send X-Frame-Options DENY or a frame-ancestors policy directive on "
        "all HTML responses.",
        base + "/checkout", "zap-xfo")
    zap_alert(
        "Server Leaks Version Information",
        "The web server announces its exact product and version string in "
        "response headers, easing the selection of version specific "
        "exploits.",
        "Suppress or genericize the Server header at the proxy tier.",
        base + "/", "zap-server")
    arachni_issue(
        "Backup file disclosure",
        "A backup copy of a server side script was found at a predictable "
        "location. Its contents reveal application source code including "
        "database connection settings.",
        "Remove editor and deployment backup artifacts from the web root "
        "and block archive extensions in the server configuration.",
        base + "/server.ts.bak", "ara-backup")
    arachni_issue(
        "Cross-Site Request Forgery",
        "A state changing form is submitted without any anti forgery token, "
        "so a hostile page can silently perform the action with the "
        "victim's ambient credentials.",
        "Issue per session anti forgery tokens and verify them on every "
        "mutating request.",
        base + "/profile", "ara-csrf")
    arachni_issue(
        "Insecure cross-origin resource sharing policy",
        "The API reflects arbitrary origins in Access-Control-Allow-Origin "
        "while also allowing credentials, letting any site read "
        "authenticated responses.",
        "Restrict allowed origins to an explicit allowlist and never "
        "combine wildcard origins with credential support.",
        base + "/api/user", "ara-cors")
    arachni_issue(
        "Missing Strict-Transport-Security header",
        "Responses over TLS omit the Strict-Transport-Security header, so "
        "browsers will still attempt plain HTTP connections that a network "
        "attacker can intercept.",
        "Send a Strict-Transport-Security header with a long max-age on all "
        "secure responses.",
        base + "/", "ara-hsts")


# ---------------------------------------------------------------------------
# report serialization per tool schema
# ---------------------------------------------------------------------------

def wrap_report(tool: str, entries: list[tuple[dict, str]]) -> tuple[object, list[str]]:
    """Build the tool's report document.

    Returns the document plus the cluster keys reordered to match the
    document's flattened finding order, since grouped schemas (trivy,
    dependency-check) do not preserve insertion order globally.
    """
    if tool == "trivy":
        by_target: dict[str, list[tuple[dict, str]]] = defaultdict(list)
        for item, key in entries:
            entry = dict(item)
            by_target[entry.pop("_target")].append((entry, key))
        results = [{"Target": target, "Class": "lang-pkgs",
                    "Vulnerabilities": [e for e, _ in pairs]}
                   for target, pairs in by_target.items()]
        keys = [key for pairs in by_target.values() for _, key in pairs]
        return ({"SchemaVersion": 2, "ArtifactName": "shop:latest",
                 "Results": results}, keys)
    if tool == "dependency-check":
        by_file: dict[str, list[tuple[dict, str]]] = defaultdict(list)
        for item, key in entries:
            entry = dict(item)
            by_file[entry.pop("_file")].append((entry, key))
        deps = [{"fileName": file, "vulnerabilities": [e for e, _ in pairs]}
                for file, pairs in by_file.items()]
        keys = [key for pairs in by_file.values() for _, key in pairs]
        return ({"reportSchema": "1.1", "dependencies": deps}, keys)

    items = [item for item, _ in entries]
    keys = [key for _, key in entries]
    if tool == "anchore":
        return ({"matches": items, "source": {"type": "image"}}, keys)
    if tool == "gitleaks":
        return (items, keys)
    if tool == "codeql":
        return ({"$schema": "https://json.schemastore.org/sarif-2.1.0.json",
                 "version": "2.1.0",
                 "runs": [{"tool": {"driver": {"name": "CodeQL"}},
                           "results": items}]}, keys)
    if tool == "horusec":
        return ({"version": "v2", "status": "success",
                 "analysisVulnerabilities": items}, keys)
    if tool == "semgrep":
        return ({"results": items, "errors": []}, keys)
    if tool == "zap":
        return ({"@version": "2.14",
                 "site": [{"@name": "shop.example.test", "alerts": items}]}, keys)
    if tool == "arachni":
        return ({"version": "1.6", "issues": items}, keys)
    raise ValueError(tool)


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

def emit(builder: ReportBuilder, testing_type: str, out_dir: Path) -> tuple[int, int]:
    reports_dir = out_dir / "reports" / testing_type.lower()
    reports_dir.mkdir(parents=True, exist_ok=True)
    catalog = [m for m in load_default_catalog() if m.testing_type == testing_type]

    document_keys: dict[str, list[str]] = {}
    for mapping in catalog:
        entries = builder.entries.get(mapping.tool_name)
        if not entries:
            continue
        document, keys = wrap_report(mapping.tool_name, entries)
        document_keys[mapping.tool_name] = keys
        path = reports_dir / f"{mapping.tool_name}.json"
        path.write_text(json.dumps(document, indent=1) + "\n", encoding="utf-8")

    # Ingest through the real pipeline so finding IDs match what users get.
    parsed = []
    next_id = 1
    id_clusters: dict[str, set[int]] = defaultdict(set)
    for mapping in catalog:
        if mapping.tool_name not in document_keys:
            continue
        findings = parse_report(reports_dir / f"{mapping.tool_name}.json", mapping, next_id)
        keys = document_keys[mapping.tool_name]
        assert len(findings) == len(keys), (
            f"{mapping.tool_name}: wrote {len(keys)} items, ingest saw {len(findings)}"
        )
        for finding, key in zip(findings, keys):
            id_clusters[key].add(finding.id)
        next_id += len(findings)
        parsed.append((mapping.tool_name, findings))

    dataset = assemble_dataset(parsed, testing_type)
    save_dataset(dataset, out_dir / f"dataset_{testing_type.lower()}.json")
    truth = ClusterSet(
        clusters=frozenset(frozenset(ids) for ids in id_clusters.values()),
        origin="ground_truth",
    )
    save_cluster_set(truth, out_dir / f"truth_{testing_type.lower()}.json")

    sizes = sorted((len(c) for c in truth.clusters), reverse=True)
    chars = [len(" ".join(f.features.values()).strip()) for f in dataset.findings]
    print(f"{testing_type}: {len(dataset.findings)} findings, "
          f"{len(truth.clusters)} clusters, max {sizes[0]}, min {sizes[-1]}, "
          f"avg {len(dataset.findings) / len(truth.clusters):.1f} per cluster, "
          f"avg {sum(chars) / len(chars):.0f} chars per finding")
    return len(dataset.findings), len(truth.clusters)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="data/benchmark")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    args = parser.parse_args()

    out_dir = Path(args.out)
    rng = random.Random(args.seed)

    sast = ReportBuilder()
    build_sast(rng, sast)
    n_findings, n_clusters = emit(sast, "SAST", out_dir)
    assert n_findings == SAST_FINDINGS, f"SAST findings {n_findings} != {SAST_FINDINGS}"
    assert n_clusters == SAST_CLUSTERS, f"SAST clusters {n_clusters} != {SAST_CLUSTERS}"

    dast = ReportBuilder()
    build_dast(dast)
    n_findings, n_clusters = emit(dast, "DAST", out_dir)
    assert n_findings == 36 and n_clusters == 10
    return 0


if __name__ == "__main__":
    sys.exit(main())
