# Root package