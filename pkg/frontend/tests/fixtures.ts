import type { ApiClient } from "../src/api.js";
import type {
    JsonGraph,
    PlanDto,
    PracticeDto,
    SelectionReportDto,
} from "../src/types.js";

export function practice(
    id: string,
    name: string,
    category: string,
    extra: Partial<PracticeDto> = {},
): PracticeDto {
    return {
        id,
        name,
        category,
        description: "",
        sources: [],
        excluded: false,
        exclusionReason: "",
        nonSpecific: false,
        objectives: [],
        ...extra,
    };
}

/** Excerpt-sized catalog: a requires chain plus one excluded practice. */
export const CATALOG: JsonGraph = {
    metadata: { name: "fixture", version: "1.0", source: "" },
    practices: [
        practice("AP11", "Software configuration management", "Technical", {
            excluded: true,
            exclusionReason: "tool discipline, not a practice",
        }),
        practice("AP28", "Definition of done", "Requirements"),
        practice("AP31", "Metaphor / Vision", "Requirements"),
        practice("AP32", "User Stories", "Requirements"),
    ],
    relations: [
        { source: "AP28", target: "AP32", type: "requires", bidirectional: false },
        { source: "AP32", target: "AP31", type: "requires", bidirectional: false },
    ],
};

export function report(overrides: Partial<SelectionReportDto> = {}): SelectionReportDto {
    return {
        closure: [],
        missingRequired: [],
        supportSuggestions: [],
        alternativeHints: [],
        warnings: [],
        ...overrides,
    };
}

/** What the server says for chosen = [AP28]. */
export const AP28_REPORT = report({
    closure: ["AP31", "AP32"],
    missingRequired: ["AP31", "AP32"],
    alternativeHints: [
        { missing: "AP31", alternatives: [] },
        { missing: "AP32", alternatives: [] },
    ],
    warnings: ["selection incomplete: 2 required practices missing"],
});

/** What the server says for chosen = [AP28, AP31, AP32]. */
export const COMPLETE_REPORT = report({ closure: ["AP31", "AP32"] });

export const EXCERPT_PLAN: PlanDto = {
    stages: [["AP31"], ["AP32"], ["AP28"]],
    byCategory: { Requirements: ["AP28", "AP31", "AP32"] },
};

interface Deferred<T> {
    promise: Promise<T>;
    resolve: (value: T) => void;
    reject: (reason: unknown) => void;
}

function deferred<T>(): Deferred<T> {
    let resolve!: (value: T) => void;
    let reject!: (reason: unknown) => void;
    const promise = new Promise<T>((res, rej) => {
        resolve = res;
        reject = rej;
    });
    return { promise, resolve, reject };
}

/** Lets time pass so settled promises run their handlers. */
export function flush(): Promise<void> {
    return new Promise((resolve) => setTimeout(resolve, 0));
}

/**
 * Scripted stand-in for the HTTP client. Validation calls park until the
 * test resolves them, and overlap is recorded so tests can assert the
 * single-flight rule.
 */
export class StubApi implements ApiClient {
    validateCalls: string[][] = [];
    substituteCalls: Array<{ chosen: string[]; from: string; to: string }> = [];
    planCalls: string[][] = [];
    private validations: Array<Deferred<SelectionReportDto>> = [];
    private substitutions: Array<Deferred<string[]>> = [];
    private plans: Array<Deferred<PlanDto>> = [];
    private inFlightValidations = 0;
    maxInFlightValidations = 0;

    fetchMap(): Promise<JsonGraph> {
        return Promise.resolve(CATALOG);
    }

    validate(chosen: string[]): Promise<SelectionReportDto> {
        this.validateCalls.push([...chosen]);
        this.inFlightValidations += 1;
        this.maxInFlightValidations = Math.max(
            this.maxInFlightValidations,
            this.inFlightValidations,
        );
        const d = deferred<SelectionReportDto>();
        this.validations.push(d);
        const done = () => {
            this.inFlightValidations -= 1;
        };
        d.promise.then(done, done);
        return d.promise;
    }

    substitute(chosen: string[], from: string, to: string): Promise<string[]> {
        this.substituteCalls.push({ chosen: [...chosen], from, to });
        const d = deferred<string[]>();
        this.substitutions.push(d);
        return d.promise;
    }

    plan(chosen: string[]): Promise<PlanDto> {
        this.planCalls.push([...chosen]);
        const d = deferred<PlanDto>();
        this.plans.push(d);
        return d.promise;
    }

    resolveValidation(index: number, value: SelectionReportDto): void {
        this.validations[index]!.resolve(value);
    }

    rejectValidation(index: number, reason: unknown): void {
        this.validations[index]!.reject(reason);
    }

    resolveSubstitution(index: number, value: string[]): void {
        this.substitutions[index]!.resolve(value);
    }

    rejectSubstitution(index: number, reason: unknown): void {
        this.substitutions[index]!.reject(reason);
    }

    resolvePlan(index: number, value: PlanDto): void {
        this.plans[index]!.resolve(value);
    }

    rejectPlan(index: number, reason: unknown): void {
        this.plans[index]!.reject(reason);
    }
}
