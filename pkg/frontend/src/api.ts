import type { ApiErrorDto, JsonGraph, PlanDto, SelectionReportDto } from "./types.js";

/** A non-2xx response, carrying the server's {code, message, details} body. */
export class ApiFailure extends Error {
    constructor(
        readonly status: number,
        readonly body: ApiErrorDto,
    ) {
        super(body.message);
        this.name = "ApiFailure";
    }
}

export interface ApiClient {
    fetchMap(): Promise<JsonGraph>;
    validate(chosen: string[]): Promise<SelectionReportDto>;
    substitute(chosen: string[], from: string, to: string): Promise<string[]>;
    plan(chosen: string[]): Promise<PlanDto>;
}

async function failureFrom(response: Response): Promise<ApiFailure> {
    let body: ApiErrorDto;
    try {
        body = (await response.json()) as ApiErrorDto;
    } catch {
        body = { code: "bad_response", message: `HTTP ${response.status}`, details: null };
    }
    return new ApiFailure(response.status, body);
}

export class HttpApiClient implements ApiClient {
    constructor(private readonly baseUrl: string = "") {}

    private async request<T>(path: string, init?: RequestInit): Promise<T> {
        const response = await fetch(this.baseUrl + path, init);
        if (!response.ok) {
            throw await failureFrom(response);
        }
        return (await response.json()) as T;
    }

    private post<T>(path: string, body: unknown): Promise<T> {
        return this.request<T>(path, {
            method: "POST",
            headers: { "Content-Type": "application/json" },
            body: JSON.stringify(body),
        });
    }

    fetchMap(): Promise<JsonGraph> {
        return this.request<JsonGraph>("/api/map");
    }

    validate(chosen: string[]): Promise<SelectionReportDto> {
        return this.post<SelectionReportDto>("/api/selection/validate", { chosen });
    }

    async substitute(chosen: string[], from: string, to: string): Promise<string[]> {
        const result = await this.post<{ chosen: string[] }>("/api/selection/substitute", {
            chosen,
            from,
            to,
        });
        return result.chosen;
    }

    plan(chosen: string[]): Promise<PlanDto> {
        return this.post<PlanDto>("/api/plan", { chosen });
    }
}
