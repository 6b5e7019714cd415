import { ApiFailure, type ApiClient } from "./api.js";
import type { ApiErrorDto, PlanDto, SelectionReportDto } from "./types.js";

export interface SelectionViewState {
    chosen: ReadonlySet<string>;
    /** Always corresponds to the current chosen set; null while it is unknown. */
    lastReport: SelectionReportDto | null;
    pending: boolean;
    error: ApiErrorDto | null;
    /** Inline, non-blocking explanation (e.g. a rejected substitution). */
    notice: string | null;
    plan: PlanDto | null;
}

export interface StoreOptions {
    /** Debounce on rapid toggles before a validation request goes out. */
    debounceMs?: number;
}

function toErrorDto(failure: unknown): ApiErrorDto {
    if (failure instanceof ApiFailure) {
        return failure.body;
    }
    const message = failure instanceof Error ? failure.message : String(failure);
    return { code: "network_error", message, details: null };
}

/**
 * Client-held selection state over a stateless server.
 *
 * Every selection edit invalidates the report, then revalidates over the
 * API. Requests are debounced and sequence-numbered; at most one
 * validation is in flight, and a response that no longer matches the
 * latest sequence number is discarded rather than applied.
 */
export class SelectionStore {
    private readonly api: ApiClient;
    private readonly catalogIds: ReadonlySet<string>;
    private readonly debounceMs: number;
    private readonly listeners = new Set<() => void>();

    private chosen = new Set<string>();
    private lastReport: SelectionReportDto | null = null;
    private pending = false;
    private error: ApiErrorDto | null = null;
    private notice: string | null = null;
    private plan: PlanDto | null = null;

    private seq = 0;
    private appliedSeq = 0;
    private inFlight = false;
    private dirty = false;
    private timer: ReturnType<typeof setTimeout> | null = null;

    constructor(api: ApiClient, catalogIds: Iterable<string>, options: StoreOptions = {}) {
        this.api = api;
        this.catalogIds = new Set(catalogIds);
        this.debounceMs = options.debounceMs ?? 150;
    }

    get state(): SelectionViewState {
        return {
            chosen: new Set(this.chosen),
            lastReport: this.lastReport,
            pending: this.pending,
            error: this.error,
            notice: this.notice,
            plan: this.plan,
        };
    }

    subscribe(listener: () => void): () => void {
        this.listeners.add(listener);
        return () => this.listeners.delete(listener);
    }

    toggle(id: string): void {
        if (!this.catalogIds.has(id)) {
            throw new Error(`unknown practice: ${id}`);
        }
        if (this.chosen.has(id)) {
            this.chosen.delete(id);
        } else {
            this.chosen.add(id);
        }
        this.selectionChanged();
    }

    /** Replace the whole selection (URL restore); unknown ids are dropped. */
    setChosen(ids: Iterable<string>): void {
        this.chosen = new Set([...ids].filter((id) => this.catalogIds.has(id)));
        this.selectionChanged();
    }

    addAllRequired(): void {
        const missing = this.lastReport?.missingRequired ?? [];
        if (missing.length === 0) {
            return;
        }
        for (const id of missing) {
            this.chosen.add(id);
        }
        this.selectionChanged();
    }

    async substitute(from: string, to: string): Promise<void> {
        this.notice = null;
        try {
            const next = await this.api.substitute(this.chosenSorted(), from, to);
            this.chosen = new Set(next);
            this.selectionChanged();
        } catch (failure) {
            // the selection is never rolled back by a failed substitution
            if (failure instanceof ApiFailure && failure.body.code === "not_alternatives") {
                const details = failure.body.details as { actualRelation?: string | null } | null;
                const relation = details?.actualRelation;
                this.notice = relation
                    ? `not alternatives (relation: ${relation})`
                    : "not alternatives";
            } else {
                this.error = toErrorDto(failure);
            }
            this.notify();
        }
    }

    async requestPlan(): Promise<void> {
        try {
            this.plan = await this.api.plan(this.chosenSorted());
            this.error = null;
        } catch (failure) {
            this.error = toErrorDto(failure);
        }
        this.notify();
    }

    dismissError(): void {
        this.error = null;
        this.notify();
    }

    dismissNotice(): void {
        this.notice = null;
        this.notify();
    }

    private chosenSorted(): string[] {
        return [...this.chosen].sort();
    }

    private notify(): void {
        for (const listener of this.listeners) {
            listener();
        }
    }

    private selectionChanged(): void {
        this.lastReport = null;
        this.plan = null;
        this.pending = true;
        this.notify();
        this.scheduleValidation();
    }

    private scheduleValidation(): void {
        if (this.timer !== null) {
            clearTimeout(this.timer);
            this.timer = null;
        }
        if (this.debounceMs === 0) {
            this.issueValidation();
            return;
        }
        this.timer = setTimeout(() => {
            this.timer = null;
            this.issueValidation();
        }, this.debounceMs);
    }

    private issueValidation(): void {
        if (this.inFlight) {
            this.dirty = true;
            return;
        }
        const seq = ++this.seq;
        this.inFlight = true;
        this.api.validate(this.chosenSorted()).then(
            (report) => this.settle(seq, { report }),
            (failure: unknown) => this.settle(seq, { failure }),
        );
    }

    private settle(
        seq: number,
        outcome: { report?: SelectionReportDto; failure?: unknown },
    ): void {
        this.inFlight = false;
        // a response is stale once a newer selection superseded its request
        const stale = this.dirty || seq !== this.seq || seq <= this.appliedSeq;
        if (!stale) {
            this.appliedSeq = seq;
            this.pending = false;
            if (outcome.report) {
                this.lastReport = outcome.report;
                this.error = null;
            } else {
                this.error = toErrorDto(outcome.failure);
            }
            this.notify();
        }
        if (this.dirty) {
            this.dirty = false;
            this.issueValidation();
        }
    }
}

export function encodeChosen(chosen: Iterable<string>): string {
    return [...chosen].sort().join(",");
}

export function decodeChosen(raw: string | null): string[] {
    if (!raw) {
        return [];
    }
    return raw
        .split(",")
        .map((part) => part.trim())
        .filter((part) => part.length > 0);
}
