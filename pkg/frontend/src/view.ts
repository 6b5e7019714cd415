import type { JsonGraph, PlanDto, PracticeDto, SelectionReportDto } from "./types.js";
import type { SelectionViewState } from "./state.js";

export interface ViewOptions {
    showExcluded: boolean;
    /** Active objective filter chips; empty set means no dimming. */
    objectives: ReadonlySet<string>;
}

export const DEFAULT_VIEW_OPTIONS: ViewOptions = {
    showExcluded: false,
    objectives: new Set(),
};

const CATEGORY_ORDER = ["Technical", "Collaboration", "Process", "Requirements", "Organizational"];
const OBJECTIVE_CHIPS = ["sp", "po", "ke"];

function esc(text: string): string {
    return text
        .replace(/&/g, "&amp;")
        .replace(/</g, "&lt;")
        .replace(/>/g, "&gt;")
        .replace(/"/g, "&quot;")
        .replace(/'/g, "&#39;");
}

function byCategory(practices: PracticeDto[]): Map<string, PracticeDto[]> {
    const groups = new Map<string, PracticeDto[]>();
    for (const category of CATEGORY_ORDER) {
        groups.set(category, []);
    }
    for (const practice of practices) {
        let group = groups.get(practice.category);
        if (group === undefined) {
            group = [];
            groups.set(practice.category, group);
        }
        group.push(practice);
    }
    return groups;
}

function practiceButton(
    practice: PracticeDto,
    state: SelectionViewState,
    options: ViewOptions,
): string {
    const classes = ["practice"];
    if (state.chosen.has(practice.id)) {
        classes.push("chosen");
    }
    if (state.lastReport !== null && state.lastReport.closure.includes(practice.id)) {
        classes.push("required");
    }
    if (practice.excluded) {
        classes.push("excluded");
    }
    if (
        options.objectives.size > 0 &&
        !practice.objectives.some((tag) => options.objectives.has(tag))
    ) {
        classes.push("dimmed");
    }
    const tooltip = practice.excluded ? ` title="${esc(practice.exclusionReason)}"` : "";
    return (
        `<button type="button" class="${classes.join(" ")}" data-toggle="${practice.id}"${tooltip}>` +
        `<span class="pid">${practice.id}</span> ${esc(practice.name)}</button>`
    );
}

export function renderCatalog(
    catalog: JsonGraph,
    state: SelectionViewState,
    options: ViewOptions,
): string {
    const visible = catalog.practices.filter((p) => options.showExcluded || !p.excluded);
    const sections: string[] = [];
    for (const [category, practices] of byCategory(visible)) {
        if (practices.length === 0) {
            continue;
        }
        const items = practices
            .map((p) => `<li>${practiceButton(p, state, options)}</li>`)
            .join("");
        sections.push(
            `<section class="category" data-category="${esc(category)}">` +
                `<h3>${esc(category)}</h3><ul>${items}</ul></section>`,
        );
    }
    return `<div class="catalog">${sections.join("")}</div>`;
}

function alternativeChips(report: SelectionReportDto, missingId: string): string {
    const hint = report.alternativeHints.find((h) => h.missing === missingId);
    if (hint === undefined || hint.alternatives.length === 0) {
        return "";
    }
    return hint.alternatives
        .map((id) => `<button type="button" class="chip" data-toggle="${id}">${id}</button>`)
        .join("");
}

export function renderMissingPanel(
    catalog: JsonGraph,
    state: SelectionViewState,
): string {
    const names = new Map(catalog.practices.map((p) => [p.id, p.name]));
    const report = state.lastReport;
    let body: string;
    if (state.chosen.size === 0) {
        body = `<p class="empty">no selection</p>`;
    } else if (report === null) {
        body = `<p class="empty">validating&hellip;</p>`;
    } else if (report.missingRequired.length === 0) {
        body = `<p class="empty">nothing missing</p>`;
    } else {
        const items = report.missingRequired
            .map(
                (id) =>
                    `<li class="missing-item" data-missing="${id}">` +
                    `<span class="pid">${id}</span> ${esc(names.get(id) ?? "")} ` +
                    `${alternativeChips(report, id)}</li>`,
            )
            .join("");
        body = `<ul>${items}</ul><button type="button" data-add-all>add all required</button>`;
    }
    const planReady =
        report !== null && report.missingRequired.length === 0 && state.chosen.size > 0;
    const planButton = `<button type="button" data-plan${planReady ? "" : " disabled"}>Plan</button>`;
    return (
        `<section class="panel missing" data-panel="missing"><h3>missing required</h3>` +
        `${body}${planButton}</section>`
    );
}

export function renderSupportPanel(catalog: JsonGraph, state: SelectionViewState): string {
    const names = new Map(catalog.practices.map((p) => [p.id, p.name]));
    const suggestions = state.lastReport?.supportSuggestions ?? [];
    const body =
        suggestions.length === 0
            ? `<p class="empty">no suggestions</p>`
            : `<ol>${suggestions
                  .map(
                      (s) =>
                          `<li data-support="${s.id}"><span class="pid">${s.id}</span> ` +
                          `${esc(names.get(s.id) ?? "")} <em>${esc(s.justification)}</em></li>`,
                  )
                  .join("")}</ol>`;
    return `<section class="panel support" data-panel="support"><h3>supported by your picks</h3>${body}</section>`;
}

export function renderSubstitutionForm(catalog: JsonGraph, state: SelectionViewState): string {
    const chosen = [...state.chosen].sort();
    const candidates = catalog.practices.filter((p) => !p.excluded);
    const fromOptions = chosen.map((id) => `<option value="${id}">${id}</option>`).join("");
    const toOptions = candidates
        .map((p) => `<option value="${p.id}">${p.id} ${esc(p.name)}</option>`)
        .join("");
    const disabled = chosen.length === 0 ? " disabled" : "";
    const notice =
        state.notice === null
            ? ""
            : `<p class="notice" data-notice>${esc(state.notice)} ` +
              `<button type="button" data-dismiss-notice>dismiss</button></p>`;
    return (
        `<form class="panel substitute" data-substitute>` +
        `<h3>substitute</h3>` +
        `<select name="from"${disabled}>${fromOptions}</select>` +
        `<select name="to"${disabled}>${toOptions}</select>` +
        `<button type="submit"${disabled}>swap</button>${notice}</form>`
    );
}

export function renderWarnings(state: SelectionViewState): string {
    const warnings = state.lastReport?.warnings ?? [];
    if (warnings.length === 0) {
        return "";
    }
    return `<ul class="warnings">${warnings.map((w) => `<li>${esc(w)}</li>`).join("")}</ul>`;
}

export function renderPlan(catalog: JsonGraph, plan: PlanDto | null): string {
    if (plan === null) {
        return "";
    }
    const names = new Map(catalog.practices.map((p) => [p.id, p.name]));
    const stages = plan.stages
        .map(
            (stage, index) =>
                `<li>stage ${index + 1}: ${stage
                    .map((id) => `${id} ${esc(names.get(id) ?? "")}`)
                    .join(", ")}</li>`,
        )
        .join("");
    const categories = Object.entries(plan.byCategory)
        .map(([category, ids]) => `<li>${esc(category)}: ${ids.join(", ")}</li>`)
        .join("");
    return (
        `<section class="panel plan" data-panel="plan"><h3>composition plan</h3>` +
        `<ol class="stages">${stages}</ol><ul class="by-category">${categories}</ul></section>`
    );
}

export function renderBanner(state: SelectionViewState): string {
    if (state.error === null) {
        return "";
    }
    return (
        `<div class="banner" role="alert">${esc(state.error.message)} ` +
        `<button type="button" data-dismiss>dismiss</button></div>`
    );
}

function renderControls(options: ViewOptions): string {
    const chips = OBJECTIVE_CHIPS.map((tag) => {
        const active = options.objectives.has(tag) ? " active" : "";
        return `<button type="button" class="chip objective${active}" data-objective="${tag}">${tag}</button>`;
    }).join("");
    const checked = options.showExcluded ? " checked" : "";
    return (
        `<div class="controls">` +
        `<label><input type="checkbox" data-show-excluded${checked}> show excluded</label>` +
        `${chips}</div>`
    );
}

/** The whole app as a pure function of (catalog, state, view options). */
export function renderApp(
    catalog: JsonGraph,
    state: SelectionViewState,
    options: ViewOptions = DEFAULT_VIEW_OPTIONS,
): string {
    return (
        renderBanner(state) +
        renderControls(options) +
        `<main>${renderCatalog(catalog, state, options)}` +
        `<aside>${renderMissingPanel(catalog, state)}${renderSupportPanel(catalog, state)}` +
        `${renderSubstitutionForm(catalog, state)}${renderWarnings(state)}` +
        `${renderPlan(catalog, state.plan)}</aside></main>`
    );
}
